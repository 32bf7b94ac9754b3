#include "capmimo/physics_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "capmimo/errors.hpp"

namespace capmimo {

namespace {

void require_finite_positive(double value, const char* name) {
    if (!std::isfinite(value) || !(value > 0.0))
        throw ConfigError(std::string(name) + " must be a finite value > 0 (got " + std::to_string(value) + ")");
}

void require_points(std::size_t n, const char* what) {
    if (n < 2)
        throw std::invalid_argument(std::string(what) + " must be at least 2 (got " + std::to_string(n) + ")");
}

double midpoint_node(std::size_t i, double step) { return (static_cast<double>(i) + 0.5) * step; }

// Composite midpoint sum of |G(x)|^2 (l - x) over [0, l].
double weighted_energy_midpoint(const SystemConfig& cfg, std::size_t n) {
    const double l = cfg.aperture;
    const double h = l / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = midpoint_node(i, h);
        sum += std::norm(green_at_offset(x, cfg)) * (l - x);
    }
    return 2.0 * h * sum;
}

}  // namespace

void SystemConfig::validate() const {
    require_finite_positive(wavelength, "wavelength");
    require_finite_positive(aperture, "aperture length");
    require_finite_positive(distance, "distance");
    require_finite_positive(noise, "noise density");
    if (!std::isfinite(power) || power < 0.0)
        throw ConfigError("power must be a finite value >= 0 (got " + std::to_string(power) + ")");
}

std::size_t default_inner_points(const SystemConfig& cfg) {
    const double per_wavelength = std::ceil(20.0 * cfg.aperture / cfg.wavelength);
    return std::max<std::size_t>(512, static_cast<std::size_t>(per_wavelength));
}

Complex green_at_offset(double x, const SystemConfig& cfg) {
    const double d = cfg.distance;
    const double lambda = cfg.wavelength;
    const double k = cfg.wavenumber();
    const double r2 = x * x + d * d;
    const double R = std::sqrt(r2);
    const double kR = k * R;
    const double angular = (d * d - 2.0 * x * x) / r2;

    // j/(kR) * angular + d^2/R^2 - angular/(kR)^2
    const Complex bracket(d * d / r2 - angular / (kR * kR), angular / kR);
    const Complex prefactor = Complex(0.0, kFreeSpaceImpedance / (2.0 * lambda * R)) * std::polar(1.0, kR);
    return prefactor * bracket;
}

Complex kernel_value(double r, double r_prime, const SystemConfig& cfg, std::size_t inner_points) {
    require_points(inner_points, "inner_points");
    if (r == r_prime)
        return {kernel_diagonal(r, cfg, inner_points), 0.0};
    // Evaluate one canonical ordering so the mirrored pair is an exact conjugate.
    if (r > r_prime)
        return std::conj(kernel_value(r_prime, r, cfg, inner_points));

    const double h = cfg.aperture / static_cast<double>(inner_points);
    Complex sum{0.0, 0.0};
    for (std::size_t k = 0; k < inner_points; ++k) {
        const double s = midpoint_node(k, h);
        sum += green_scalar(r, s, cfg) * std::conj(green_scalar(r_prime, s, cfg));
    }
    return cfg.power * h * sum;
}

double kernel_diagonal(double r, const SystemConfig& cfg, std::size_t inner_points) {
    require_points(inner_points, "inner_points");
    const double h = cfg.aperture / static_cast<double>(inner_points);
    double sum = 0.0;
    for (std::size_t k = 0; k < inner_points; ++k)
        sum += std::norm(green_scalar(r, midpoint_node(k, h), cfg));
    return cfg.power * h * sum;
}

double operator_trace(const SystemConfig& cfg, std::size_t outer_points, std::size_t inner_points) {
    require_points(outer_points, "outer_points");
    require_points(inner_points, "inner_points");
    const double h = cfg.aperture / static_cast<double>(outer_points);
    double sum = 0.0;
    for (std::size_t i = 0; i < outer_points; ++i)
        sum += kernel_diagonal(midpoint_node(i, h), cfg, inner_points);
    return h * sum;
}

double operator_trace_reference(const SystemConfig& cfg, std::size_t inner_points) {
    const double coarse = operator_trace(cfg, 4096, inner_points);
    const double fine = operator_trace(cfg, 8192, inner_points);
    return (4.0 * fine - coarse) / 3.0;
}

double green_energy_integral(const SystemConfig& cfg) {
    const double coarse = weighted_energy_midpoint(cfg, 16384);
    const double fine = weighted_energy_midpoint(cfg, 32768);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace capmimo
