#pragma once

#include <complex>
#include <cstddef>
#include <numbers>

namespace capmimo {

using Complex = std::complex<double>;

/// Free-space wave impedance mu_0 * c, in ohms.
inline constexpr double kFreeSpaceImpedance = 120.0 * std::numbers::pi;

/// Physical scenario shared by every model: two parallel line apertures of
/// length `aperture` separated by `distance`, carrying the scalar z-polarized
/// field at `wavelength`. `power` is the source power density (R_J = P delta)
/// and `noise` the thermal noise density n0 (E[N N*] = n0/2 delta).
struct SystemConfig {
    double wavelength = 0.04;
    double aperture = 2.0;
    double distance = 10.0;
    double power = 1.0;
    double noise = 2.0;

    double wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;

    /// True when the separation is comparable to the wavelength, where
    /// evanescent terms dominate the kernel.
    bool near_field() const { return distance < 2.0 * wavelength; }
};

/// max(512, ceil(20 * l / lambda)): at least 20 source samples per wavelength.
std::size_t default_inner_points(const SystemConfig& cfg);

/// Scalar Green's function for transverse offset d as a function of the
/// axial offset x = r - s (near-, mid- and far-field terms).
Complex green_at_offset(double x, const SystemConfig& cfg);

inline Complex green_scalar(double r, double s, const SystemConfig& cfg) {
    return green_at_offset(r - s, cfg);
}

/// K_E(r, r') = P * int_0^l G(r,s) G*(r',s) ds with an `inner_points` midpoint
/// rule. The mirrored pair is the exact conjugate and the diagonal is real.
Complex kernel_value(double r, double r_prime, const SystemConfig& cfg, std::size_t inner_points);

/// K_E(r, r), real and nonnegative.
double kernel_diagonal(double r, const SystemConfig& cfg, std::size_t inner_points);

/// tr(T_E) = int_0^l K_E(r,r) dr by an outer midpoint rule.
double operator_trace(const SystemConfig& cfg, std::size_t outer_points, std::size_t inner_points);

/// High-accuracy trace for a fixed inner rule: one Richardson step on the
/// outer midpoint rule (4096 and 8192 points). Used as the continuous
/// reference in the receiver SNR control.
double operator_trace_reference(const SystemConfig& cfg, std::size_t inner_points);

/// int_0^l int_0^l |G(r,s)|^2 dr ds, independent of P. Reduced to the
/// one-dimensional form 2 int_0^l (l - x) |G(x)|^2 dx and integrated with a
/// Richardson-extrapolated midpoint rule.
double green_energy_integral(const SystemConfig& cfg);

}  // namespace capmimo
