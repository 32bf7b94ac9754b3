#include "capmimo/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "capmimo/errors.hpp"

namespace capmimo {

namespace {

constexpr std::size_t kCurvatureIntervals = 2000;

constexpr std::array<std::pair<ModelTag, std::string_view>, 5> kTagNames{{
    {ModelTag::continuous, "continuous"},
    {ModelTag::discrete_rx, "discrete_rx"},
    {ModelTag::discrete_trx, "discrete_trx"},
    {ModelTag::intermediate_I0p, "intermediate_I0p"},
    {ModelTag::intermediate_I0pp, "intermediate_I0pp"},
}};

// max_j |f(x_{j-1}) - 2 f(x_j) + f(x_{j+1})| / h^2 over interior samples.
double max_second_difference(const std::vector<double>& f, double h) {
    double sup = 0.0;
    for (std::size_t j = 1; j + 1 < f.size(); ++j)
        sup = std::max(sup, std::abs(f[j - 1] - 2.0 * f[j] + f[j + 1]) / (h * h));
    return sup;
}

MiResult base_result(ModelTag tag, const SystemConfig& cfg) {
    MiResult r;
    r.tag = tag;
    r.near_field = cfg.near_field();
    return r;
}

NoiseControl rx_noise_from_sum(double diagonal_sum, std::size_t m, const SystemConfig& cfg,
                               const ReceiverReference& ref) {
    if (!(ref.trace > 0.0))
        throw SnrControlUndefinedError("receiver SNR control undefined: int K_E(r,r) dr is zero (P = 0?)");
    const double l = cfg.aperture;
    const double md = static_cast<double>(m);

    NoiseControl nc;
    nc.n_value = cfg.noise * diagonal_sum / ref.trace;
    nc.limit_value = md * cfg.noise / l;
    nc.gap = std::abs(l * nc.n_value / md - cfg.noise);
    nc.error_bound = cfg.noise * l * l * l * ref.curvature_sup / (24.0 * md * md * ref.trace);
    return nc;
}

NoiseControl trx_noise_from_sum(double energy_sum, std::size_t m1, std::size_t m2, const SystemConfig& cfg,
                                const TransceiverReference& ref) {
    if (!(ref.energy > 0.0))
        throw SnrControlUndefinedError("transceiver SNR control undefined: int int |G|^2 is zero");
    const double l = cfg.aperture;
    const double prod = static_cast<double>(m1) * static_cast<double>(m2);
    const double m_min = static_cast<double>(std::min(m1, m2));

    NoiseControl nc;
    nc.n_value = cfg.noise * energy_sum / ref.energy;
    nc.limit_value = prod * cfg.noise / (l * l);
    nc.gap = std::abs(cfg.noise - l * l * nc.n_value / prod);
    // g(r,r,s) = |G(r - s)|^2, so both partial second derivatives equal h''(x).
    nc.error_bound = cfg.noise * std::pow(l, 4) * 2.0 * ref.curvature_sup / (24.0 * m_min * m_min * ref.energy);
    return nc;
}

void require_antennas(std::size_t m, const char* what) {
    if (m == 0)
        throw std::invalid_argument(std::string(what) + " must be at least 1");
}

}  // namespace

std::string_view to_string(ModelTag tag) {
    for (const auto& [t, name] : kTagNames)
        if (t == tag)
            return name;
    return "unknown";
}

std::optional<ModelTag> parse_model_tag(std::string_view text) {
    for (const auto& [t, name] : kTagNames)
        if (name == text)
            return t;
    return std::nullopt;
}

double MiResult::value_bits() const { return value_nats / std::numbers::ln2; }

std::size_t default_reference_points(const SystemConfig& cfg) {
    const auto half_wave = static_cast<std::size_t>(std::ceil(2.0 * cfg.aperture / cfg.wavelength));
    return std::max<std::size_t>(1600, 16 * half_wave);
}

ReceiverReference receiver_reference(const SystemConfig& cfg, const ModelOptions& opts) {
    cfg.validate();
    ReceiverReference ref;
    ref.inner_points = opts.inner(cfg);
    ref.trace = operator_trace_reference(cfg, ref.inner_points);

    const double h = cfg.aperture / static_cast<double>(kCurvatureIntervals);
    std::vector<double> diag(kCurvatureIntervals + 1);
    for (std::size_t j = 0; j <= kCurvatureIntervals; ++j)
        diag[j] = kernel_diagonal(static_cast<double>(j) * h, cfg, ref.inner_points);
    ref.curvature_sup = max_second_difference(diag, h);
    return ref;
}

TransceiverReference transceiver_reference(const SystemConfig& cfg) {
    cfg.validate();
    TransceiverReference ref;
    ref.energy = green_energy_integral(cfg);

    // |G(x)|^2 on [-l, l] with the same step as the receiver diagonal.
    const double h = cfg.aperture / static_cast<double>(kCurvatureIntervals);
    std::vector<double> energy(2 * kCurvatureIntervals + 1);
    for (std::size_t j = 0; j < energy.size(); ++j) {
        const double x = (static_cast<double>(j) - static_cast<double>(kCurvatureIntervals)) * h;
        energy[j] = std::norm(green_at_offset(x, cfg));
    }
    ref.curvature_sup = max_second_difference(energy, h);
    return ref;
}

MiResult mi_continuous(const SystemConfig& cfg, std::size_t ref_m, const ModelOptions& opts) {
    cfg.validate();
    if (ref_m < 64)
        throw std::invalid_argument("mi_continuous: ref_m must be at least 64 (got " + std::to_string(ref_m) + ")");

    MiResult r = base_result(ModelTag::continuous, cfg);
    r.ref_m = ref_m;
    r.inner_points = opts.inner(cfg);
    r.noise_used = cfg.noise;

    const QuadratureGrid grid = midpoint_grid(cfg.aperture, ref_m);
    r.spectrum = hermitian_eigenvalues(sample_receiver_kernel(grid, cfg, r.inner_points), opts.clamp_rel);
    r.value_nats = logdet_one_plus_scaled(r.spectrum, grid.weight / (cfg.noise / 2.0));
    return r;
}

NoiseControl noise_rx(const QuadratureGrid& grid, const SystemConfig& cfg, const ModelOptions& opts) {
    return noise_rx(grid, cfg, receiver_reference(cfg, opts));
}

NoiseControl noise_rx(const QuadratureGrid& grid, const SystemConfig& cfg, const ReceiverReference& ref) {
    if (grid.size() == 0)
        throw std::invalid_argument("noise_rx: empty grid");
    double sum = 0.0;
    for (double r : grid.points)
        sum += kernel_diagonal(r, cfg, ref.inner_points);
    return rx_noise_from_sum(sum, grid.size(), cfg, ref);
}

MiResult mi_discrete_rx(std::size_t m, const SystemConfig& cfg, const ModelOptions& opts) {
    require_antennas(m, "mi_discrete_rx: m");
    cfg.validate();
    if (cfg.power == 0.0)
        return mi_discrete_rx(m, cfg, ReceiverReference{opts.inner(cfg), 0.0, 0.0}, opts);
    return mi_discrete_rx(m, cfg, receiver_reference(cfg, opts), opts);
}

MiResult mi_discrete_rx(std::size_t m, const SystemConfig& cfg, const ReceiverReference& ref,
                        const ModelOptions& opts) {
    require_antennas(m, "mi_discrete_rx: m");
    cfg.validate();

    MiResult r = base_result(ModelTag::discrete_rx, cfg);
    r.m2 = m;
    r.inner_points = ref.inner_points;

    const QuadratureGrid grid = midpoint_grid(cfg.aperture, m);
    const HermitianKernelMatrix k = sample_receiver_kernel(grid, cfg, ref.inner_points);
    r.spectrum = hermitian_eigenvalues(k, opts.clamp_rel);
    if (cfg.power == 0.0) {
        // No signal: the information is zero whatever the noise; report the asymptotic n1.
        r.noise_used = static_cast<double>(m) * cfg.noise / cfg.aperture;
        r.value_nats = 0.0;
        return r;
    }
    r.noise_used = rx_noise_from_sum(k.trace(), m, cfg, ref).n_value;
    r.value_nats = logdet_one_plus_scaled(r.spectrum, 2.0 / r.noise_used);
    return r;
}

NoiseControl noise_trx(const QuadratureGrid& rx, const QuadratureGrid& tx, const SystemConfig& cfg) {
    return noise_trx(rx, tx, cfg, transceiver_reference(cfg));
}

NoiseControl noise_trx(const QuadratureGrid& rx, const QuadratureGrid& tx, const SystemConfig& cfg,
                       const TransceiverReference& ref) {
    if (rx.size() == 0 || tx.size() == 0)
        throw std::invalid_argument("noise_trx: empty grid");
    double sum = 0.0;
    for (double r : rx.points)
        for (double s : tx.points)
            sum += std::norm(green_scalar(r, s, cfg));
    return trx_noise_from_sum(sum, tx.size(), rx.size(), cfg, ref);
}

MiResult mi_discrete_trx(std::size_t m1, std::size_t m2, const SystemConfig& cfg, const ModelOptions& opts) {
    require_antennas(m1, "mi_discrete_trx: m1");
    require_antennas(m2, "mi_discrete_trx: m2");
    cfg.validate();
    return mi_discrete_trx(m1, m2, cfg, transceiver_reference(cfg), opts);
}

MiResult mi_discrete_trx(std::size_t m1, std::size_t m2, const SystemConfig& cfg, const TransceiverReference& ref,
                         const ModelOptions& opts) {
    require_antennas(m1, "mi_discrete_trx: m1");
    require_antennas(m2, "mi_discrete_trx: m2");
    cfg.validate();

    MiResult r = base_result(ModelTag::discrete_trx, cfg);
    r.m1 = m1;
    r.m2 = m2;

    const QuadratureGrid tx = midpoint_grid(cfg.aperture, m1);
    const QuadratureGrid rx = midpoint_grid(cfg.aperture, m2);
    const std::vector<Complex> h = channel_matrix(rx, tx, cfg);
    double energy_sum = 0.0;
    for (const Complex& g : h)
        energy_sum += std::norm(g);

    const HermitianKernelMatrix k = HermitianKernelMatrix::gram(h, m2, m1, cfg.power);
    r.spectrum = hermitian_eigenvalues(k, opts.clamp_rel);
    r.noise_used = trx_noise_from_sum(energy_sum, m1, m2, cfg, ref).n_value;
    r.value_nats = logdet_one_plus_scaled(r.spectrum, 2.0 / r.noise_used);
    return r;
}

MiResult mi_intermediate(IntermediateKind kind, const SystemConfig& cfg, std::size_t ref_m, std::size_t m1,
                         std::size_t m2, const ModelOptions& opts) {
    return mi_intermediate(kind, cfg, mi_continuous(cfg, ref_m, opts), m1, m2, opts);
}

MiResult mi_intermediate(IntermediateKind kind, const SystemConfig& cfg, const MiResult& continuous,
                         std::size_t m1, std::size_t m2, const ModelOptions& opts) {
    if (continuous.tag != ModelTag::continuous)
        throw std::invalid_argument("mi_intermediate: expected a continuous-model result");
    require_antennas(m2, "mi_intermediate: m2");
    if (kind == IntermediateKind::I0_double_prime)
        require_antennas(m1, "mi_intermediate: m1");

    MiResult r = base_result(
        kind == IntermediateKind::I0_prime ? ModelTag::intermediate_I0p : ModelTag::intermediate_I0pp, cfg);
    r.ref_m = continuous.ref_m;
    r.inner_points = continuous.inner_points;
    r.m1 = kind == IntermediateKind::I0_prime ? 0 : m1;
    r.m2 = m2;
    r.spectrum = continuous.spectrum;
    if (cfg.power == 0.0)
        return r;

    const double l = cfg.aperture;
    double z = 0.0;
    if (kind == IntermediateKind::I0_prime) {
        r.noise_used = noise_rx(midpoint_grid(l, m2), cfg, opts).n_value;
        z = 2.0 * static_cast<double>(m2) / (l * r.noise_used);
    } else {
        r.noise_used = noise_trx(midpoint_grid(l, m2), midpoint_grid(l, m1), cfg).n_value;
        z = 2.0 * static_cast<double>(m1) * static_cast<double>(m2) / (l * l * r.noise_used);
    }
    const double weight = l / static_cast<double>(continuous.ref_m);
    r.value_nats = logdet_one_plus_scaled(r.spectrum, z * weight);
    return r;
}

DofEstimate dof_estimate(const SystemConfig& cfg, std::size_t ref_m, double threshold_rel, const ModelOptions& opts) {
    if (!(threshold_rel > 0.0 && threshold_rel < 1.0))
        throw std::invalid_argument("dof_estimate: threshold_rel must lie in (0, 1)");
    cfg.validate();
    if (ref_m == 0)
        throw std::invalid_argument("dof_estimate: ref_m must be at least 1");

    DofEstimate est;
    est.threshold_rel = threshold_rel;
    est.analytic = cfg.aperture * cfg.aperture / (cfg.distance * cfg.wavelength);
    const QuadratureGrid grid = midpoint_grid(cfg.aperture, ref_m);
    est.spectrum = hermitian_eigenvalues(sample_receiver_kernel(grid, cfg, opts.inner(cfg)), opts.clamp_rel);
    if (!est.spectrum.eigenvalues.empty() && est.spectrum.eigenvalues.front() > 0.0) {
        const double cut = threshold_rel * est.spectrum.eigenvalues.front();
        est.eigen_count = static_cast<std::size_t>(std::count_if(
            est.spectrum.eigenvalues.begin(), est.spectrum.eigenvalues.end(), [cut](double v) { return v >= cut; }));
    }
    return est;
}

}  // namespace capmimo
