#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "capmimo/physics_kernel.hpp"

namespace capmimo {

/// Equal-weight midpoint nodes r_i = (i - 0.5) l / m on [0, l]. Doubles as the
/// antenna placement of an evenly spaced array.
struct QuadratureGrid {
    std::vector<double> points;
    double length = 0.0;
    double weight = 0.0;

    std::size_t size() const { return points.size(); }
};

QuadratureGrid midpoint_grid(double length, std::size_t m);

/// Dense complex matrix that is Hermitian bit-for-bit: entry (i,j) is the
/// exact conjugate of (j,i) and the diagonal is real. Row-major storage.
class HermitianKernelMatrix {
public:
    HermitianKernelMatrix() = default;

    /// Takes a full row-major matrix; throws NotHermitianError unless the
    /// invariants already hold exactly.
    HermitianKernelMatrix(std::size_t dim, std::vector<Complex> entries);

    /// Builds alpha * A * A^H from a row-major rows x cols factor. Only the
    /// lower triangle is computed; the upper one is its mirrored conjugate.
    static HermitianKernelMatrix gram(std::span<const Complex> factor, std::size_t rows, std::size_t cols,
                                      double alpha);

    std::size_t dim() const { return dim_; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
    std::span<const Complex> entries() const { return entries_; }

    /// Sum of the (real) diagonal.
    double trace() const;

    /// Same operator expressed on reordered grid points: result(i,j) = this(p[i], p[j]).
    HermitianKernelMatrix permuted(std::span<const std::size_t> order) const;

private:
    std::size_t dim_ = 0;
    std::vector<Complex> entries_;
};

struct SpectralResult {
    std::vector<double> eigenvalues;    // nonincreasing, all >= 0
    std::size_t clamped_count = 0;      // negatives in [-clamp_floor, -roundoff_floor) set to 0
    std::size_t roundoff_zeroed = 0;    // negatives within the eigensolver's backward error, set to 0
    double clamp_floor = 0.0;           // clamp_rel * lambda_max
    double roundoff_floor = 0.0;        // min(clamp_rel, dim * eps) * lambda_max
    double min_raw_eigenvalue = 0.0;    // most negative value before clamping

    double sum() const;
};

inline constexpr double kDefaultClampRel = 1e-12;

/// Real spectrum of a Hermitian matrix, sorted nonincreasing. Throws NotPsdError
/// if any eigenvalue lies below -clamp_rel * lambda_max.
SpectralResult hermitian_eigenvalues(const HermitianKernelMatrix& k, double clamp_rel = kDefaultClampRel);

/// sum_k log(1 + scale * lambda_k) = log det(I + scale K).
double logdet_one_plus_scaled(const SpectralResult& spectrum, double scale);
double logdet_one_plus_scaled(const HermitianKernelMatrix& k, double scale, double clamp_rel = kDefaultClampRel);

/// Sampled K_E(r_i, r_j) on a receive grid, transmitter kept continuous via an
/// `inner_points` midpoint rule.
HermitianKernelMatrix sample_receiver_kernel(const QuadratureGrid& rx, const SystemConfig& cfg,
                                             std::size_t inner_points);

/// P * sum_k G(r_i, s_k) G*(r_j, s_k) for discrete transmit and receive arrays.
HermitianKernelMatrix sample_transceiver_kernel(const QuadratureGrid& rx, const QuadratureGrid& tx,
                                                const SystemConfig& cfg);

/// Row-major G(r_i, s_k), rows indexed by the receive grid.
std::vector<Complex> channel_matrix(const QuadratureGrid& rx, const QuadratureGrid& tx, const SystemConfig& cfg);

}  // namespace capmimo
