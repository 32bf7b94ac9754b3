#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "capmimo/errors.hpp"
#include "capmimo/spectra.hpp"
#include "oracles.hpp"

using namespace capmimo;

namespace {

SystemConfig at_distance(double d) {
    SystemConfig cfg;
    cfg.distance = d;
    return cfg;
}

HermitianKernelMatrix diagonal(std::vector<double> values) {
    const std::size_t n = values.size();
    std::vector<Complex> e(n * n);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = values[i];
    return HermitianKernelMatrix(n, std::move(e));
}

// B B^H / n for a seeded complex Gaussian B: Hermitian PSD with full rank.
std::vector<Complex> random_psd(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Complex> b(n * n);
    for (auto& v : b) v = {g(rng), g(rng)};
    std::vector<Complex> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            Complex s{};
            for (std::size_t k = 0; k < n; ++k) s += b[i * n + k] * std::conj(b[j * n + k]);
            a[i * n + j] = s / static_cast<double>(n);
            a[j * n + i] = std::conj(a[i * n + j]);
        }
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = a[i * n + i].real();
    return a;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("midpoint_grid places equal-weight nodes") {
    const QuadratureGrid one = midpoint_grid(2.0, 1);
    CHECK(one.points == std::vector<double>{1.0});
    CHECK(one.weight == 2.0);

    const QuadratureGrid four = midpoint_grid(2.0, 4);
    CHECK(four.points == std::vector<double>{0.25, 0.75, 1.25, 1.75});
    CHECK(four.weight == 0.5);
    CHECK(four.size() == 4);

    const QuadratureGrid half_wave = midpoint_grid(2.0, 100);
    CHECK(half_wave.weight == doctest::Approx(0.04 / 2.0).epsilon(1e-15));
    for (std::size_t i = 1; i < half_wave.size(); ++i) {
        CHECK(half_wave.points[i] > half_wave.points[i - 1]);
        CHECK(half_wave.points[i] - half_wave.points[i - 1] == doctest::Approx(0.02).epsilon(1e-12));
    }
    for (std::size_t m : {1, 3, 7, 100, 1001}) {
        const QuadratureGrid g = midpoint_grid(2.0, m);
        CHECK(g.weight * static_cast<double>(m) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(g.points.front() > 0.0);
        CHECK(g.points.back() < 2.0);
    }
}

TEST_CASE("midpoint_grid rejects empty or degenerate grids") {
    CHECK_THROWS_AS(midpoint_grid(2.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(midpoint_grid(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(midpoint_grid(-1.0, 4), std::invalid_argument);
}

TEST_CASE("HermitianKernelMatrix enforces its invariants") {
    CHECK_THROWS_AS(HermitianKernelMatrix(2, {1.0, Complex{0, 1}, Complex{0, 1}, 1.0}), NotHermitianError);
    CHECK_THROWS_AS(HermitianKernelMatrix(2, {Complex{1, 1e-20}, 0.0, 0.0, 1.0}), NotHermitianError);
    CHECK_THROWS_AS(HermitianKernelMatrix(2, {1.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(HermitianKernelMatrix(2, {1.0, Complex{0, 1}, Complex{0, -1}, 1.0}));
}

TEST_CASE("gram matrices are Hermitian bit for bit") {
    for (double d : {0.1, 1.0, 10.0}) {
        const auto k = sample_receiver_kernel(midpoint_grid(2.0, 33), at_distance(d), 400);
        for (std::size_t i = 0; i < k.dim(); ++i) {
            CHECK(k(i, i).imag() == 0.0);
            for (std::size_t j = 0; j < k.dim(); ++j) CHECK(k(i, j) == std::conj(k(j, i)));
        }
    }
}

TEST_CASE("sampled receiver kernel matches kernel_value") {
    const SystemConfig cfg;
    const QuadratureGrid grid = midpoint_grid(2.0, 6);
    const auto k = sample_receiver_kernel(grid, cfg, 500);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            const Complex ref = kernel_value(grid.points[i], grid.points[j], cfg, 500);
            CHECK(std::abs(k(i, j) - ref) <= 1e-12 * std::abs(k(i, i)));
        }
}

TEST_CASE("sampled transceiver kernel matches its definition") {
    const SystemConfig cfg;
    const QuadratureGrid rx = midpoint_grid(2.0, 5), tx = midpoint_grid(2.0, 7);
    const auto k = sample_transceiver_kernel(rx, tx, cfg);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            Complex ref{};
            for (double s : tx.points)
                ref += cfg.power * green_scalar(rx.points[i], s, cfg) * std::conj(green_scalar(rx.points[j], s, cfg));
            CHECK(std::abs(k(i, j) - ref) <= 1e-12 * std::abs(k(i, i)));
        }
}

TEST_CASE("spectrum of trivial matrices") {
    const auto zero = hermitian_eigenvalues(HermitianKernelMatrix(3, std::vector<Complex>(9)));
    CHECK(zero.eigenvalues == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(zero.clamped_count == 0);

    const auto scaled = hermitian_eigenvalues(diagonal({2.5, 2.5, 2.5}));
    for (double v : scaled.eigenvalues) CHECK(v == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(scaled.clamped_count == 0);

    const auto sorted = hermitian_eigenvalues(diagonal({1.0, 3.0, 2.0}));
    CHECK(std::is_sorted(sorted.eigenvalues.rbegin(), sorted.eigenvalues.rend()));
    CHECK(sorted.eigenvalues.front() == doctest::Approx(3.0));
}

TEST_CASE("negative eigenvalues are clamped, counted or rejected") {
    const auto tiny = hermitian_eigenvalues(diagonal({1.0, -1e-13}));
    CHECK(tiny.clamped_count == 1);
    CHECK(tiny.eigenvalues.back() == 0.0);
    CHECK(tiny.min_raw_eigenvalue == doctest::Approx(-1e-13));
    CHECK(tiny.clamp_floor == doctest::Approx(1e-12));

    const auto roundoff = hermitian_eigenvalues(diagonal({1.0, -1e-17}));
    CHECK(roundoff.clamped_count == 0);
    CHECK(roundoff.roundoff_zeroed == 1);
    CHECK(roundoff.eigenvalues.back() == 0.0);

    CHECK_THROWS_AS(hermitian_eigenvalues(diagonal({1.0, -1.0})), NotPsdError);
    CHECK_THROWS_AS(hermitian_eigenvalues(diagonal({1.0, -1e-11})), NotPsdError);
    CHECK_NOTHROW(hermitian_eigenvalues(diagonal({1.0, -1e-11}), 1e-10));
    CHECK_THROWS_AS(hermitian_eigenvalues(diagonal({1.0}), -1.0), std::invalid_argument);
}

TEST_CASE("eigenvalues at m = 8 match an independent eigensolver") {
    const auto k = sample_receiver_kernel(midpoint_grid(2.0, 8), SystemConfig{}, 1000);
    const std::vector<Complex> dense(k.entries().begin(), k.entries().end());
    const auto expected = oracle::eigenvalues(dense, 8);
    const auto got = hermitian_eigenvalues(k);
    REQUIRE(got.eigenvalues.size() == 8);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(std::abs(got.eigenvalues[i] - expected[i]) <= 1e-10 * std::abs(expected[i]));
}

TEST_CASE("eigenvalues sum to the trace") {
    for (double d : {0.1, 1.0, 10.0, 100.0})
        for (std::size_t m : {4, 16, 64, 200}) {
            const auto k = sample_receiver_kernel(midpoint_grid(2.0, m), at_distance(d), 400);
            const auto s = hermitian_eigenvalues(k);
            CHECK(std::abs(s.sum() - k.trace()) <= 1e-9 * k.trace());
            const auto t = sample_transceiver_kernel(midpoint_grid(2.0, m), midpoint_grid(2.0, m + 3), at_distance(d));
            const auto st = hermitian_eigenvalues(t);
            CHECK(std::abs(st.sum() - t.trace()) <= 1e-9 * t.trace());
        }
}

TEST_CASE("logdet of trivial matrices") {
    const auto k = sample_receiver_kernel(midpoint_grid(2.0, 5), SystemConfig{}, 200);
    CHECK(logdet_one_plus_scaled(k, 0.0) == 0.0);
    CHECK(logdet_one_plus_scaled(diagonal({3.0, 3.0, 3.0, 3.0}), 0.5) ==
          doctest::Approx(4.0 * std::log1p(1.5)).epsilon(1e-15));
    CHECK_THROWS_AS(logdet_one_plus_scaled(k, -1.0), std::invalid_argument);
}

TEST_CASE("logdet matches a row-reduction determinant on random PSD matrices") {
    for (unsigned seed = 1; seed <= 10; ++seed) {
        const auto a = random_psd(6, seed);
        const HermitianKernelMatrix k(6, a);
        for (double scale : {0.1, 1.0, 37.0}) {
            const double expected = oracle::logdet_identity_plus(a, 6, scale);
            CHECK(std::abs(logdet_one_plus_scaled(k, scale) - expected) <= 1e-10 * std::abs(expected));
        }
    }
}

TEST_CASE("logdet is nondecreasing in scale and power") {
    for (double d : {0.1, 10.0}) {
        SystemConfig cfg = at_distance(d);
        const auto k = sample_receiver_kernel(midpoint_grid(2.0, 24), cfg, 300);
        double prev = 0.0;
        for (double scale = 1e-8; scale < 1e2; scale *= 3.0) {
            const double v = logdet_one_plus_scaled(k, scale);
            CHECK(v >= prev);
            prev = v;
        }
        prev = 0.0;
        for (double p : {0.0, 0.01, 0.1, 1.0, 10.0}) {
            cfg.power = p;
            const double v = logdet_one_plus_scaled(sample_receiver_kernel(midpoint_grid(2.0, 24), cfg, 300), 1e-3);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("logdet is invariant under reordering the grid") {
    std::mt19937_64 rng(5);
    for (double d : {0.1, 1.0, 10.0}) {
        const auto k = sample_receiver_kernel(midpoint_grid(2.0, 40), at_distance(d), 300);
        std::vector<std::size_t> order(40);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        const auto p = k.permuted(order);
        for (std::size_t i = 0; i < 40; ++i)
            for (std::size_t j = 0; j < 40; ++j) CHECK(p(i, j) == k(order[i], order[j]));
        const double a = logdet_one_plus_scaled(k, 1e-3), b = logdet_one_plus_scaled(p, 1e-3);
        // Same matrix up to a permutation similarity; only eigensolver rounding differs.
        CHECK(std::abs(a - b) <= 1e-12 * a);
    }
}

}  // TEST_SUITE
