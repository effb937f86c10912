#ifndef SDDE_MODEL_HPP
#define SDDE_MODEL_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdde/markov.hpp"
#include "sdde/stability_params.hpp"

namespace sdde::model {

using Vec = std::vector<double>;

// Drift coefficient: (x, y, regime) -> out, with out of length state_dim.
// y is the delayed state. Regimes are 1-based.
using DriftFn = std::function<void(std::span<const double> x, std::span<const double> y,
                                   int regime, std::span<double> out)>;
// Diffusion coefficient: out is state_dim x noise_dim, row-major.
using DiffusionFn = std::function<void(std::span<const double> x, std::span<const double> y,
                                       int regime, std::span<double> out)>;
using DelayFn = std::function<double(double)>;
using HistoryFn = std::function<void(double, std::span<double>)>;

// Hybrid delay model with split coefficients. The composite drift/diffusion
// are always the sum of a globally Lipschitz part and a super-linear part;
// only the super-linear part is evaluated at clipped arguments by the scheme.
struct HybridSddeModel {
    std::string name;
    int state_dim = 1;
    int noise_dim = 1;
    int n_regimes = 1;

    DriftFn lipschitz_drift;      // F1
    DiffusionFn lipschitz_diffusion; // G1
    DriftFn super_drift;          // F
    DiffusionFn super_diffusion;  // G

    markov::Generator generator;
    DelayFn delay;                      // t >= 0 -> lag; negative values are clipped to 0
    double tau = 0.0;                   // sup of the (clipped) delay
    double delay_derivative_bound = 0.0; // in [0, 1)
    HistoryFn history;                  // t in [-tau, 0] -> state
    double holder_exponent = 1.0;       // in (0, 1]
    int initial_regime = 1;

    // Basic shape checks plus a grid spot-check that the clipped delay stays
    // inside [0, tau]. Throws RejectedInputError / ModelViolationError.
    void validate(double horizon_hint = 32.0) const;

    // Composite coefficients f = F1 + F and g = G1 + G; never stored, always
    // assembled from the split parts.
    void drift(std::span<const double> x, std::span<const double> y, int regime,
               std::span<double> out) const;
    void diffusion(std::span<const double> x, std::span<const double> y, int regime,
                   std::span<double> out) const;
};

// Step-size-indexed truncation rule. growth_envelope dominates the
// super-linear coefficients on balls; cap controls how fast the clipping
// radius grows as the step shrinks.
struct TruncationPolicy {
    std::function<double(double)> growth_envelope;     // strictly increasing, w >= 0
    std::function<double(double)> growth_envelope_inv; // inverse on [envelope(0), inf)
    std::function<double(double)> cap;                 // strictly decreasing on (0, max_delta]
    double max_delta = 1.0;                            // in (0, 1]
};

// Recorded regularity/growth constants of a model (used as checker defaults).
struct ModelConstants {
    double k1 = 0.0;    // Lipschitz/growth constant of the Lipschitz pair
    double k2 = 0.0;    // one-sided growth constant
    double p_bar = 2.0; // moment exponent, >= 2
    double q_bar = 4.0; // monotonicity exponent, > 2
    double k7 = 0.0;    // monotonicity constant
    double rho = 0.0;   // polynomial degree of the super-linear local Lipschitz bound
    double k5 = 0.0;    // delay Lipschitz constant
    double k6 = 0.0;    // history Holder constant

    void validate() const;
};

// Radius of the clipping ball for step size delta:
// growth_envelope_inv(cap(delta)). Throws RejectedInputError when delta is
// outside (0, max_delta].
double truncation_radius(const TruncationPolicy& policy, double delta);

// Radial projection onto the closed ball of the given radius; the origin maps
// to itself. Identity inside the ball, direction-preserving outside.
void radial_clip(std::span<const double> x, double radius, std::span<double> out);
Vec radial_clip(const Vec& x, double radius);

// The four coefficient parts at one evaluation point, with the super-linear
// parts evaluated at clipped arguments. diffusion slots are flattened
// state_dim x noise_dim.
struct CoefficientParts {
    Vec drift_lipschitz;
    Vec drift_truncated;
    Vec diffusion_lipschitz;
    Vec diffusion_truncated;
};

CoefficientParts truncated_coefficient_parts(const HybridSddeModel& model,
                                             const TruncationPolicy& policy, double delta,
                                             const Vec& x, const Vec& y, int regime);

// Assembled truncated coefficients: (F1 + F_clipped, G1 + G_clipped).
std::pair<Vec, Vec> truncated_coefficients(const HybridSddeModel& model,
                                           const TruncationPolicy& policy, double delta,
                                           const Vec& x, const Vec& y, int regime);

// Sampling report for the policy conditions. Falsification only: a pass means
// no violation was found, not that the conditions are proved.
struct PolicyReport {
    bool envelope_ok = false;       // max |F| v |G| <= envelope(w) on sampled balls
    double envelope_worst_margin = 0.0; // max over samples of (|F| v |G|) - envelope(w)
    double envelope_worst_w = 0.0;
    bool cap_at_max_delta_ok = false;   // cap(max_delta) >= envelope(1)
    bool quarter_power_ok = false;      // delta^{1/4} * cap(delta) <= 1 on a log grid
    double quarter_power_worst = 0.0;   // max of delta^{1/4} * cap(delta) - 1
    bool inverse_ok = false;            // envelope_inv(envelope(w)) == w on samples
    double inverse_worst = 0.0;
    bool pass = false;
};

PolicyReport validate_policy(const HybridSddeModel& model, const TruncationPolicy& policy,
                             long n_samples, std::uint64_t stream);

// A builtin model bundle addressable by name from the CLI.
struct BuiltinModel {
    HybridSddeModel model;
    TruncationPolicy policy;
    ModelConstants constants;
    std::optional<analysis::StabilityParams> stability;
};

// Scalar two-regime model with a degree-five drift used for the convergence
// experiments. History is constant 1 (Holder-1).
BuiltinModel example_convergence_model();

// Same skeleton with the second-regime diffusion x*sin^2(y) and the stability
// constants (11, 1, 2, 1) attached.
BuiltinModel example_stability_model();

// Name -> factory for all builtin models.
const std::map<std::string, BuiltinModel (*)()>& builtin_models();

// Throws RejectedInputError for unknown names.
BuiltinModel make_builtin(const std::string& name);

} // namespace sdde::model

#endif // SDDE_MODEL_HPP
