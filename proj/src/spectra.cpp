#include "capmimo/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <cblas.h>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "capmimo/errors.hpp"

namespace capmimo {

QuadratureGrid midpoint_grid(double length, std::size_t m) {
    if (m == 0)
        throw std::invalid_argument("midpoint_grid: m must be at least 1");
    if (!std::isfinite(length) || !(length > 0.0))
        throw std::invalid_argument("midpoint_grid: length must be > 0");

    QuadratureGrid grid;
    grid.length = length;
    grid.weight = length / static_cast<double>(m);
    grid.points.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        grid.points[i] = (static_cast<double>(i) + 0.5) * length / static_cast<double>(m);
    return grid;
}

HermitianKernelMatrix::HermitianKernelMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_)
        throw std::invalid_argument("HermitianKernelMatrix: expected " + std::to_string(dim_ * dim_) + " entries, got " +
                                    std::to_string(entries_.size()));
    for (std::size_t i = 0; i < dim_; ++i) {
        if ((*this)(i, i).imag() != 0.0)
            throw NotHermitianError("diagonal entry " + std::to_string(i) + " has a nonzero imaginary part");
        for (std::size_t j = 0; j < i; ++j) {
            if ((*this)(i, j) != std::conj((*this)(j, i)))
                throw NotHermitianError("entries (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") and its mirror are not exact conjugates");
        }
    }
}

HermitianKernelMatrix HermitianKernelMatrix::gram(std::span<const Complex> factor, std::size_t rows, std::size_t cols,
                                                  double alpha) {
    if (factor.size() != rows * cols)
        throw std::invalid_argument("HermitianKernelMatrix::gram: factor size does not match rows x cols");

    HermitianKernelMatrix out;
    out.dim_ = rows;
    out.entries_.assign(rows * rows, Complex{0.0, 0.0});
    if (rows == 0)
        return out;
    if (cols > 0 && alpha != 0.0) {
        cblas_zherk(CblasRowMajor, CblasLower, CblasNoTrans, static_cast<blasint>(rows), static_cast<blasint>(cols),
                    alpha, factor.data(), static_cast<blasint>(cols), 0.0, out.entries_.data(),
                    static_cast<blasint>(rows));
    }
    for (std::size_t i = 0; i < rows; ++i) {
        Complex& diag = out.entries_[i * rows + i];
        diag = Complex(diag.real(), 0.0);
        for (std::size_t j = 0; j < i; ++j)
            out.entries_[j * rows + i] = std::conj(out.entries_[i * rows + j]);
    }
    return out;
}

double HermitianKernelMatrix::trace() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        sum += (*this)(i, i).real();
    return sum;
}

HermitianKernelMatrix HermitianKernelMatrix::permuted(std::span<const std::size_t> order) const {
    if (order.size() != dim_)
        throw std::invalid_argument("HermitianKernelMatrix::permuted: order has the wrong length");
    std::vector<Complex> out(dim_ * dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j)
            out[i * dim_ + j] = (*this)(order[i], order[j]);
    return HermitianKernelMatrix(dim_, std::move(out));
}

double SpectralResult::sum() const { return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0); }

SpectralResult hermitian_eigenvalues(const HermitianKernelMatrix& k, double clamp_rel) {
    if (!(clamp_rel >= 0.0))
        throw std::invalid_argument("hermitian_eigenvalues: clamp_rel must be >= 0");

    SpectralResult result;
    const std::size_t n = k.dim();
    if (n == 0)
        return result;

    std::vector<Complex> work(k.entries().begin(), k.entries().end());
    std::vector<double> w(n);
    const lapack_int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'N', 'L', static_cast<lapack_int>(n), work.data(),
                                           static_cast<lapack_int>(n), w.data());
    if (info != 0)
        throw Error("zheevd failed with info = " + std::to_string(info));

    std::sort(w.begin(), w.end(), std::greater<>());
    const double scale = std::max(w.front(), 0.0);
    const double eps = std::numeric_limits<double>::epsilon();
    result.clamp_floor = clamp_rel * scale;
    result.roundoff_floor = std::min(clamp_rel, static_cast<double>(n) * eps) * scale;
    result.min_raw_eigenvalue = w.back();

    for (double& value : w) {
        if (value >= 0.0)
            continue;
        if (value < -result.clamp_floor)
            throw NotPsdError("eigenvalue " + std::to_string(value) + " is below -clamp_rel * lambda_max = " +
                              std::to_string(-result.clamp_floor));
        if (value < -result.roundoff_floor)
            ++result.clamped_count;
        else
            ++result.roundoff_zeroed;
        value = 0.0;
    }
    result.eigenvalues = std::move(w);
    return result;
}

double logdet_one_plus_scaled(const SpectralResult& spectrum, double scale) {
    if (!(scale >= 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("logdet_one_plus_scaled: scale must be finite and >= 0");
    double sum = 0.0;
    for (double lambda : spectrum.eigenvalues)
        sum += std::log1p(scale * lambda);
    return sum;
}

double logdet_one_plus_scaled(const HermitianKernelMatrix& k, double scale, double clamp_rel) {
    return logdet_one_plus_scaled(hermitian_eigenvalues(k, clamp_rel), scale);
}

std::vector<Complex> channel_matrix(const QuadratureGrid& rx, const QuadratureGrid& tx, const SystemConfig& cfg) {
    std::vector<Complex> h(rx.size() * tx.size());
    for (std::size_t i = 0; i < rx.size(); ++i)
        for (std::size_t k = 0; k < tx.size(); ++k)
            h[i * tx.size() + k] = green_scalar(rx.points[i], tx.points[k], cfg);
    return h;
}

HermitianKernelMatrix sample_receiver_kernel(const QuadratureGrid& rx, const SystemConfig& cfg,
                                             std::size_t inner_points) {
    if (inner_points < 2)
        throw std::invalid_argument("inner_points must be at least 2");
    const QuadratureGrid source = midpoint_grid(cfg.aperture, inner_points);
    const std::vector<Complex> h = channel_matrix(rx, source, cfg);
    return HermitianKernelMatrix::gram(h, rx.size(), source.size(), cfg.power * source.weight);
}

HermitianKernelMatrix sample_transceiver_kernel(const QuadratureGrid& rx, const QuadratureGrid& tx,
                                                const SystemConfig& cfg) {
    const std::vector<Complex> h = channel_matrix(rx, tx, cfg);
    return HermitianKernelMatrix::gram(h, rx.size(), tx.size(), cfg.power);
}

}  // namespace capmimo
