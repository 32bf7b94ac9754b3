#pragma once

// Reference routines for the unit and acceptance suites. They share no code
// with the library: different quadrature families, a textbook determinant and
// an independent eigensolver.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Scalar Green's function written out term by term in long double.
inline cplx green(double x_in, double d_in, double lambda_in) {
    const long double x = x_in, d = d_in, lambda = lambda_in;
    const long double pi = std::numbers::pi_v<long double>;
    const long double z0 = 120.0L * pi;
    const long double k = 2.0L * pi / lambda;
    const long double r2 = x * x + d * d;
    const long double r = std::sqrt(r2);
    const long double kr = k * r;
    const long double a = (d * d - 2.0L * x * x) / r2;
    const std::complex<long double> bracket{d * d / r2 - a / (kr * kr), a / kr};
    const std::complex<long double> phase{std::cos(kr), std::sin(kr)};
    const std::complex<long double> g = std::complex<long double>{0.0L, z0 / (2.0L * lambda * r)} * phase * bracket;
    return {static_cast<double>(g.real()), static_cast<double>(g.imag())};
}

// Adaptive Gauss-Kronrod (7/15) on [a, b] for a complex integrand.
namespace detail {
inline constexpr double kNodes[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrod[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGauss[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline std::pair<cplx, double> gk15(const std::function<cplx(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx kr = fc * kKronrod[7];
    cplx gs = fc * kGauss[3];
    for (int i = 0; i < 7; ++i) {
        const cplx pair = f(c - h * kNodes[i]) + f(c + h * kNodes[i]);
        kr += pair * kKronrod[i];
        if (i % 2 == 1) gs += pair * kGauss[i / 2];
    }
    return {kr * h, std::abs((kr - gs) * h)};
}

inline cplx adapt(const std::function<cplx(double)>& f, double a, double b, double tol, int depth) {
    auto [value, err] = gk15(f, a, b);
    if (err <= tol || depth == 0) return value;
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth - 1) + adapt(f, c, b, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline cplx integrate(const std::function<cplx(double)>& f, double a, double b, double tol = 1e-13,
                      std::size_t panels = 64) {
    cplx total{};
    const double h = (b - a) / static_cast<double>(panels);
    cplx scale{};
    for (std::size_t p = 0; p < panels; ++p) scale += detail::gk15(f, a + h * p, a + h * (p + 1)).first;
    const double abs_tol = tol * std::max(std::abs(scale), 1e-300) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) total += detail::adapt(f, a + h * p, a + h * (p + 1), abs_tol, 30);
    return total;
}

// K_E(r, r') with the inner integral done adaptively.
inline cplx kernel(double r, double rp, double d, double lambda, double l, double power) {
    auto f = [&](double s) { return green(r - s, d, lambda) * std::conj(green(rp - s, d, lambda)); };
    return power * integrate(f, 0.0, l);
}

// Composite tensor-product Gauss-Legendre rule for P * int int |G(r - s)|^2 dr ds.
inline double trace_gauss(double d, double lambda, double l, double power, std::size_t panels) {
    static constexpr double nodes[5] = {0.0, 0.538469310105683091036314420700208, -0.538469310105683091036314420700208,
                                        0.906179845938663992797626878299393, -0.906179845938663992797626878299393};
    static constexpr double weights[5] = {0.568888888888888888888888888888889, 0.478628670499366468041291514835638,
                                          0.478628670499366468041291514835638, 0.236926885056189087514264040719917,
                                          0.236926885056189087514264040719917};
    const double h = l / static_cast<double>(panels);
    std::vector<double> x, w;
    for (std::size_t p = 0; p < panels; ++p)
        for (int q = 0; q < 5; ++q) {
            x.push_back(h * (p + 0.5 + 0.5 * nodes[q]));
            w.push_back(0.5 * h * weights[q]);
        }
    long double total = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) total += w[i] * w[j] * std::norm(green(x[i] - x[j], d, lambda));
    return power * static_cast<double>(total);
}

// det(A) by Gaussian elimination with partial pivoting.
inline cplx determinant(std::vector<cplx> a, std::size_t n) {
    cplx det{1.0, 0.0};
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[pivot * n + c])) pivot = r;
        if (a[pivot * n + c] == cplx{}) return {};
        if (pivot != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[pivot * n + k]);
            det = -det;
        }
        det *= a[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const cplx f = a[r * n + c] / a[c * n + c];
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
        }
    }
    return det;
}

// log det(I + scale * K) through the determinant above. For Hermitian PSD K
// the determinant is real and at least one.
inline double logdet_identity_plus(const std::vector<cplx>& k, std::size_t n, double scale) {
    std::vector<cplx> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = scale * k[i * n + j] + (i == j ? 1.0 : 0.0);
    return std::log(std::abs(determinant(std::move(a), n)));
}

// Eigenvalues in nonincreasing order from Eigen's self-adjoint solver.
inline std::vector<double> eigenvalues(const std::vector<cplx>& k, std::size_t n) {
    Eigen::MatrixXcd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = k[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    std::reverse(out.begin(), out.end());
    return out;
}

// Receiver kernel matrix assembled from the adaptive kernel oracle.
inline std::vector<cplx> receiver_matrix(std::size_t m, double d, double lambda, double l, double power) {
    std::vector<cplx> k(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            k[i * m + j] = kernel((i + 0.5) * l / m, (j + 0.5) * l / m, d, lambda, l, power);
    return k;
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
