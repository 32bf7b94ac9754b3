#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capmimo/models.hpp"

namespace capmimo {

/// One (distance, array size) cell of a sweep. Receiver sweeps keep the
/// transmitter continuous, which is recorded as m1 = 0.
struct SweepRow {
    std::string scenario;
    double d = 0.0;
    std::size_t m1 = 0;
    std::size_t m2 = 0;
    std::size_t ref_m = 0;
    double mi_nats = 0.0;
    double mi_ref_nats = 0.0;
    double abs_gap = 0.0;
    double n_used = 0.0;
    ModelTag tag = ModelTag::discrete_rx;
    std::optional<double> wall_time_s;
    std::string error;  // nonempty when the cell failed; numeric fields are then NaN

    bool ok() const { return error.empty(); }
    double mi_bits() const;
    /// Array size that governs the convergence rate: m2 for a continuous
    /// transmitter, min(m1, m2) otherwise.
    std::size_t effective_m() const;

    bool operator==(const SweepRow&) const = default;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t m_min = 0;
    std::size_t m_max = 0;
    std::size_t points = 0;
};

struct SweepOptions {
    std::string scenario = "default";
    ModelOptions model;
    std::size_t threads = 0;  // 0: worker_count()
};

/// Worker cap from CAPMIMO_THREADS (unset or 0: hardware concurrency).
std::size_t worker_count();

/// I1 against I0 for every (d, m). Rows come out distance-major in input order.
std::vector<SweepRow> sweep_receiver(const SystemConfig& cfg, std::span<const double> distances,
                                     std::span<const std::size_t> m_values, std::size_t ref_m,
                                     const SweepOptions& opts = {});

/// I2 with m1 = m2 = m against I0 for every (d, m).
std::vector<SweepRow> sweep_transceiver(const SystemConfig& cfg, std::span<const double> distances,
                                        std::span<const std::size_t> m_values, std::size_t ref_m,
                                        const SweepOptions& opts = {});

struct GridSweep {
    std::vector<SweepRow> rows;  // row-major over (m1_values, m2_values)
    std::size_t rows_m1 = 0;
    std::size_t cols_m2 = 0;
    /// max |I2(a,b) - I2(b,a)| over pairs present in both orders; 0 if none.
    double symmetry_gap = 0.0;

    const SweepRow& at(std::size_t i, std::size_t j) const { return rows[i * cols_m2 + j]; }
};

/// I2 over the Cartesian product of transmit and receive array sizes at one distance.
GridSweep sweep_grid(const SystemConfig& cfg, double d, std::span<const std::size_t> m1_values,
                     std::span<const std::size_t> m2_values, std::size_t ref_m, const SweepOptions& opts = {});

/// Least-squares fit of log(error) = intercept + slope * log(m). Points with a
/// nonpositive or non-finite error are skipped; m values must be distinct.
/// Throws std::invalid_argument with fewer than three usable points.
SlopeFit fit_power_law(std::span<const double> m, std::span<const double> error);

/// Least squares of log(abs_gap) on log(effective_m). Failed rows and rows with
/// abs_gap < 1e-12 * mi_ref_nats are skipped. Throws std::invalid_argument with
/// fewer than three usable rows at distinct m.
SlopeFit fit_convergence_slope(std::span<const SweepRow> rows);

/// Usable rows of one distance minus the first (pre-asymptotic) point; what the
/// CLI fits when reporting convergence orders.
std::vector<SweepRow> convergence_window(std::span<const SweepRow> rows);

}  // namespace capmimo
