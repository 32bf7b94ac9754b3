#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "capmimo/physics_kernel.hpp"
#include "capmimo/spectra.hpp"

namespace capmimo {

enum class ModelTag {
    continuous,         // I0: continuous transceivers
    discrete_rx,        // I1: continuous transmitter, m-point receiver
    discrete_trx,       // I2: m1-point transmitter, m2-point receiver
    intermediate_I0p,   // I0': Fredholm log-det at z = 2m / (l n1)
    intermediate_I0pp,  // I0'': Fredholm log-det at z = 2 m1 m2 / (l^2 n2)
};

std::string_view to_string(ModelTag tag);
std::optional<ModelTag> parse_model_tag(std::string_view text);

struct ModelOptions {
    std::size_t inner_points = 0;  // 0 selects default_inner_points(cfg)
    double clamp_rel = kDefaultClampRel;

    std::size_t inner(const SystemConfig& cfg) const {
        return inner_points != 0 ? inner_points : default_inner_points(cfg);
    }
};

/// max(1600, 16 * ceil(2 l / lambda)).
std::size_t default_reference_points(const SystemConfig& cfg);

struct MiResult {
    double value_nats = 0.0;
    ModelTag tag = ModelTag::continuous;
    std::size_t m1 = 0;  // transmit antennas; 0 when the transmitter is continuous
    std::size_t m2 = 0;  // receive antennas; 0 when the receiver is continuous
    std::size_t ref_m = 0;
    std::size_t inner_points = 0;
    double noise_used = 0.0;  // n0, n1 or n2, whichever the model applied
    bool near_field = false;
    SpectralResult spectrum;  // eigenvalues of the sampled matrix

    double value_bits() const;
};

/// Noise density chosen so the discrete model's total receive SNR equals the
/// continuous one, plus how far its rescaled value sits from n0.
struct NoiseControl {
    double n_value = 0.0;
    double limit_value = 0.0;   // m n0 / l, or m1 m2 n0 / l^2
    double gap = 0.0;           // |l n1 / m - n0|, or |n0 - l^2 n2 / (m1 m2)|
    double error_bound = 0.0;   // midpoint-rule bound on `gap` (estimated curvature)
};

/// Continuous-side integrals the SNR control divides by. Computing them is the
/// expensive part of a discrete model, so sweeps build them once per scenario.
struct ReceiverReference {
    std::size_t inner_points = 0;
    double trace = 0.0;          // int_0^l K_E(r,r) dr
    double curvature_sup = 0.0;  // estimate of sup |d^2/dr^2 K_E(r,r)|
};

struct TransceiverReference {
    double energy = 0.0;         // int int |G(r,s)|^2 dr ds
    double curvature_sup = 0.0;  // estimate of sup |d^2/dx^2 |G(x)|^2| on [-l, l]
};

/// Curvature estimates use central second differences on a 2001-point grid
/// (step l/2000); they are estimates, not certified suprema.
ReceiverReference receiver_reference(const SystemConfig& cfg, const ModelOptions& opts = {});
TransceiverReference transceiver_reference(const SystemConfig& cfg);

/// I0 = log det(1 + T_E / (n0/2)), Nystrom-approximated on `ref_m` midpoints.
MiResult mi_continuous(const SystemConfig& cfg, std::size_t ref_m, const ModelOptions& opts = {});

/// n1 = n0 * sum_i K_E(r_i,r_i) / int K_E(r,r) dr. Throws SnrControlUndefinedError when P = 0.
NoiseControl noise_rx(const QuadratureGrid& grid, const SystemConfig& cfg, const ModelOptions& opts = {});
NoiseControl noise_rx(const QuadratureGrid& grid, const SystemConfig& cfg, const ReceiverReference& ref);

/// I1 = log det(I + K_E(r_i,r_j) / (n1/2)) on an m-point midpoint array.
MiResult mi_discrete_rx(std::size_t m, const SystemConfig& cfg, const ModelOptions& opts = {});
MiResult mi_discrete_rx(std::size_t m, const SystemConfig& cfg, const ReceiverReference& ref,
                        const ModelOptions& opts = {});

/// n2 = n0 * sum_ij |G(r_i,s_j)|^2 / int int |G|^2.
NoiseControl noise_trx(const QuadratureGrid& rx, const QuadratureGrid& tx, const SystemConfig& cfg);
NoiseControl noise_trx(const QuadratureGrid& rx, const QuadratureGrid& tx, const SystemConfig& cfg,
                       const TransceiverReference& ref);

/// I2 with m1 transmit and m2 receive antennas, K_J = P I.
MiResult mi_discrete_trx(std::size_t m1, std::size_t m2, const SystemConfig& cfg, const ModelOptions& opts = {});
MiResult mi_discrete_trx(std::size_t m1, std::size_t m2, const SystemConfig& cfg, const TransceiverReference& ref,
                         const ModelOptions& opts = {});

enum class IntermediateKind { I0_prime, I0_double_prime };

/// Reference-grid Fredholm log-det with the rescaled argument of the discrete
/// model. I0_prime uses the receiver count `m2` (m1 ignored); I0_double_prime
/// uses both.
MiResult mi_intermediate(IntermediateKind kind, const SystemConfig& cfg, std::size_t ref_m, std::size_t m1,
                         std::size_t m2, const ModelOptions& opts = {});

/// Same, reusing an already computed continuous spectrum on the ref_m grid.
MiResult mi_intermediate(IntermediateKind kind, const SystemConfig& cfg, const MiResult& continuous,
                         std::size_t m1, std::size_t m2, const ModelOptions& opts = {});

struct DofEstimate {
    std::size_t eigen_count = 0;  // eigenvalues >= threshold_rel * lambda_max
    double analytic = 0.0;        // l^2 / (d lambda)
    double threshold_rel = 0.0;
    SpectralResult spectrum;
};

DofEstimate dof_estimate(const SystemConfig& cfg, std::size_t ref_m, double threshold_rel = 0.01,
                         const ModelOptions& opts = {});

}  // namespace capmimo
