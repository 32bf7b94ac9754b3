#include "capmimo/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

#include "parallel.hpp"

namespace capmimo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

SystemConfig at_distance(const SystemConfig& cfg, double d) {
    SystemConfig out = cfg;
    out.distance = d;
    return out;
}

std::string format_count(double m) { return std::to_string(static_cast<long long>(m)); }

void mark_failed(SweepRow& row, const std::string& what) {
    row.error = what.empty() ? "unknown error" : what;
    row.mi_nats = kNaN;
    row.abs_gap = kNaN;
    row.n_used = kNaN;
}

void check_sweep_inputs(std::span<const double> distances, std::span<const std::size_t> m_values,
                        std::size_t ref_m) {
    if (distances.empty() || m_values.empty())
        throw std::invalid_argument("sweep: distance and m lists must be nonempty");
    const std::size_t m_max = *std::max_element(m_values.begin(), m_values.end());
    if (ref_m <= m_max)
        throw std::invalid_argument("sweep: ref_m (" + std::to_string(ref_m) + ") must exceed the largest m (" +
                                    std::to_string(m_max) + ")");
}

// Continuous reference and per-distance SNR-control integrals, one per distance.
struct DistanceContext {
    SystemConfig cfg;
    double mi_ref = kNaN;
    ReceiverReference rx_ref;
    TransceiverReference trx_ref;
    std::string error;
};

enum class Side { receiver, transceiver };

std::vector<DistanceContext> prepare_distances(const SystemConfig& cfg, std::span<const double> distances,
                                               std::size_t ref_m, Side side, const SweepOptions& opts,
                                               std::size_t threads) {
    std::vector<DistanceContext> ctx(distances.size());
    detail::parallel_for(distances.size(), threads, [&](std::size_t i) {
        DistanceContext& c = ctx[i];
        try {
            c.cfg = at_distance(cfg, distances[i]);
            c.cfg.validate();
            c.mi_ref = mi_continuous(c.cfg, ref_m, opts.model).value_nats;
            if (side == Side::receiver) {
                if (c.cfg.power > 0.0)
                    c.rx_ref = receiver_reference(c.cfg, opts.model);
                else
                    c.rx_ref.inner_points = opts.model.inner(c.cfg);
            } else {
                c.trx_ref = transceiver_reference(c.cfg);
            }
        } catch (const std::exception& e) {
            c.error = e.what();
        }
    });
    return ctx;
}

std::vector<SweepRow> run_diagonal_sweep(const SystemConfig& cfg, std::span<const double> distances,
                                         std::span<const std::size_t> m_values, std::size_t ref_m,
                                         const SweepOptions& opts, Side side) {
    check_sweep_inputs(distances, m_values, ref_m);
    const std::size_t threads = opts.threads != 0 ? opts.threads : worker_count();
    const std::vector<DistanceContext> ctx = prepare_distances(cfg, distances, ref_m, side, opts, threads);

    const std::size_t nm = m_values.size();
    std::vector<SweepRow> rows(distances.size() * nm);
    detail::parallel_for(rows.size(), threads, [&](std::size_t idx) {
        const DistanceContext& c = ctx[idx / nm];
        const std::size_t m = m_values[idx % nm];
        SweepRow& row = rows[idx];
        row.scenario = opts.scenario;
        row.d = distances[idx / nm];
        row.m1 = side == Side::receiver ? 0 : m;
        row.m2 = m;
        row.ref_m = ref_m;
        row.tag = side == Side::receiver ? ModelTag::discrete_rx : ModelTag::discrete_trx;
        row.mi_ref_nats = c.mi_ref;

        const auto start = Clock::now();
        try {
            if (!c.error.empty())
                throw std::runtime_error("reference failed: " + c.error);
            const MiResult r = side == Side::receiver ? mi_discrete_rx(m, c.cfg, c.rx_ref, opts.model)
                                                      : mi_discrete_trx(m, m, c.cfg, c.trx_ref, opts.model);
            row.mi_nats = r.value_nats;
            row.n_used = r.noise_used;
            row.abs_gap = std::abs(row.mi_nats - row.mi_ref_nats);
        } catch (const std::exception& e) {
            mark_failed(row, e.what());
        }
        row.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    });
    return rows;
}

}  // namespace

double SweepRow::mi_bits() const { return mi_nats / std::numbers::ln2; }

std::size_t SweepRow::effective_m() const { return m1 == 0 ? m2 : std::min(m1, m2); }

std::size_t worker_count() {
    if (const char* env = std::getenv("CAPMIMO_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> sweep_receiver(const SystemConfig& cfg, std::span<const double> distances,
                                     std::span<const std::size_t> m_values, std::size_t ref_m,
                                     const SweepOptions& opts) {
    return run_diagonal_sweep(cfg, distances, m_values, ref_m, opts, Side::receiver);
}

std::vector<SweepRow> sweep_transceiver(const SystemConfig& cfg, std::span<const double> distances,
                                        std::span<const std::size_t> m_values, std::size_t ref_m,
                                        const SweepOptions& opts) {
    return run_diagonal_sweep(cfg, distances, m_values, ref_m, opts, Side::transceiver);
}

GridSweep sweep_grid(const SystemConfig& cfg, double d, std::span<const std::size_t> m1_values,
                     std::span<const std::size_t> m2_values, std::size_t ref_m, const SweepOptions& opts) {
    if (m1_values.empty() || m2_values.empty())
        throw std::invalid_argument("sweep_grid: m1 and m2 lists must be nonempty");
    const std::size_t m_max = std::max(*std::max_element(m1_values.begin(), m1_values.end()),
                                       *std::max_element(m2_values.begin(), m2_values.end()));
    if (ref_m <= m_max)
        throw std::invalid_argument("sweep_grid: ref_m must exceed every array size");

    const std::size_t threads = opts.threads != 0 ? opts.threads : worker_count();
    const double distances[] = {d};
    const DistanceContext c = prepare_distances(cfg, distances, ref_m, Side::transceiver, opts, 1).front();

    GridSweep grid;
    grid.rows_m1 = m1_values.size();
    grid.cols_m2 = m2_values.size();
    grid.rows.resize(grid.rows_m1 * grid.cols_m2);
    detail::parallel_for(grid.rows.size(), threads, [&](std::size_t idx) {
        SweepRow& row = grid.rows[idx];
        row.scenario = opts.scenario;
        row.d = d;
        row.m1 = m1_values[idx / grid.cols_m2];
        row.m2 = m2_values[idx % grid.cols_m2];
        row.ref_m = ref_m;
        row.tag = ModelTag::discrete_trx;
        row.mi_ref_nats = c.mi_ref;
        const auto start = Clock::now();
        try {
            if (!c.error.empty())
                throw std::runtime_error("reference failed: " + c.error);
            const MiResult r = mi_discrete_trx(row.m1, row.m2, c.cfg, c.trx_ref, opts.model);
            row.mi_nats = r.value_nats;
            row.n_used = r.noise_used;
            row.abs_gap = std::abs(row.mi_nats - row.mi_ref_nats);
        } catch (const std::exception& e) {
            mark_failed(row, e.what());
        }
        row.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    });

    for (std::size_t i = 0; i < grid.rows_m1; ++i) {
        for (std::size_t j = 0; j < grid.cols_m2; ++j) {
            const SweepRow& ab = grid.at(i, j);
            // Look for the transposed cell (m1, m2) = (ab.m2, ab.m1).
            const auto ti = std::find(m1_values.begin(), m1_values.end(), ab.m2);
            const auto tj = std::find(m2_values.begin(), m2_values.end(), ab.m1);
            if (ti == m1_values.end() || tj == m2_values.end())
                continue;
            const SweepRow& ba = grid.at(static_cast<std::size_t>(ti - m1_values.begin()),
                                         static_cast<std::size_t>(tj - m2_values.begin()));
            if (ab.ok() && ba.ok())
                grid.symmetry_gap = std::max(grid.symmetry_gap, std::abs(ab.mi_nats - ba.mi_nats));
        }
    }
    return grid;
}

SlopeFit fit_power_law(std::span<const double> m, std::span<const double> error) {
    if (m.size() != error.size())
        throw std::invalid_argument("fit_power_law: m and error lengths differ");
    std::vector<double> xs;
    std::vector<double> ys;
    std::set<double> seen;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!std::isfinite(error[i]) || !(error[i] > 0.0) || !(m[i] > 0.0))
            continue;
        if (!seen.insert(m[i]).second)
            throw std::invalid_argument("fit_power_law: repeated m value " + format_count(m[i]));
        xs.push_back(std::log(m[i]));
        ys.push_back(std::log(error[i]));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("fit_power_law: need at least 3 usable points, have " +
                                    std::to_string(xs.size()));

    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.points = xs.size();
    fit.m_min = static_cast<std::size_t>(*seen.begin());
    fit.m_max = static_cast<std::size_t>(*seen.rbegin());
    return fit;
}

SlopeFit fit_convergence_slope(std::span<const SweepRow> rows) {
    std::vector<double> ms;
    std::vector<double> gaps;
    std::set<std::size_t> seen;
    for (const SweepRow& row : rows) {
        if (!row.ok() || !std::isfinite(row.abs_gap) || !(row.abs_gap > 0.0))
            continue;
        if (row.abs_gap < 1e-12 * std::abs(row.mi_ref_nats))
            continue;
        const std::size_t m = row.effective_m();
        if (m == 0 || !seen.insert(m).second)
            continue;
        ms.push_back(static_cast<double>(m));
        gaps.push_back(row.abs_gap);
    }
    if (ms.size() < 3)
        throw std::invalid_argument("fit_convergence_slope: need at least 3 usable rows at distinct m, have " +
                                    std::to_string(ms.size()));
    return fit_power_law(ms, gaps);
}

std::vector<SweepRow> convergence_window(std::span<const SweepRow> rows) {
    std::vector<SweepRow> usable;
    for (const SweepRow& row : rows)
        if (row.ok() && std::isfinite(row.abs_gap) && row.abs_gap >= 1e-12 * std::abs(row.mi_ref_nats) &&
            row.abs_gap > 0.0)
            usable.push_back(row);
    std::sort(usable.begin(), usable.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.effective_m() < b.effective_m(); });
    if (!usable.empty())
        usable.erase(usable.begin());
    return usable;
}

}  // namespace capmimo
