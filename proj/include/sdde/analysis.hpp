#ifndef SDDE_ANALYSIS_HPP
#define SDDE_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "sdde/model.hpp"
#include "sdde/solver.hpp"
#include "sdde/stability_params.hpp"

namespace sdde::analysis {

using model::HybridSddeModel;
using model::TruncationPolicy;
using model::Vec;

// ---------------------------------------------------------------------------
// Strong-error ladder
// ---------------------------------------------------------------------------

struct ConvergenceStudyResult {
    std::vector<double> deltas;     // strictly increasing
    std::vector<double> rms_errors; // one per delta
    long n_paths = 0;
    std::vector<long> blowups; // per level (the level's own blowups)
    long ref_blowups = 0;      // reference-level blowups (invalidate the whole path)
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    bool degenerate = false; // some rms error was exactly zero; fit skipped
};

// Couples every level to a reference resolution through one Brownian path and
// one chain per path_id, then fits log(rms) against log(delta).
// Throws StudyInvalidError when more than 1% of paths blow up at any level.
ConvergenceStudyResult strong_error_study(const HybridSddeModel& model,
                                          const TruncationPolicy& policy,
                                          const std::vector<double>& deltas, double ref_delta,
                                          double horizon, long n_paths, std::uint64_t seed,
                                          int workers = 1);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    bool degenerate = false;
};

// Ordinary least squares of log(rms) on log(delta). Degenerate when fewer
// than two points or any error is not strictly positive.
RateFit fit_rate(const std::vector<double>& deltas, const std::vector<double>& rms_errors);

// ---------------------------------------------------------------------------
// Stability
// ---------------------------------------------------------------------------

// Terminal-ratio Lyapunov estimate log|X(T)| / T. Returns -inf for a terminal
// state of exactly zero and +inf for a non-finite one.
double lyapunov_estimate(const solver::PathRecord& path);

// Diagnostic variant: OLS slope of log|X_k| against t_k after discarding the
// leading burn_in_fraction of the path. NaN when fewer than two usable points.
double lyapunov_regression_estimate(const solver::PathRecord& path, double burn_in_fraction);

struct StabilityStudyResult {
    std::vector<double> per_path_exponents; // path_id order; +-inf sentinels possible
    std::vector<double> per_path_regression; // only filled when burn_in_fraction > 0
    double eta = 0.0;                       // NaN when no params were supplied
    double gamma_star = 0.0;                // NaN when no params were supplied
    double fraction_negative = 0.0;
    double median_exponent = 0.0;
    long blowups = 0;
};

StabilityStudyResult stability_study(const HybridSddeModel& model,
                                     const TruncationPolicy& policy, double delta,
                                     double horizon, long n_paths, std::uint64_t seed,
                                     double burn_in_fraction,
                                     const std::optional<StabilityParams>& params,
                                     int workers = 1);

// ---------------------------------------------------------------------------
// Rate equations
// ---------------------------------------------------------------------------

// Root of  l1 - 2*l3 = eta + (l2 + l4) * exp(eta * tau)  on (0, l1 - 2*l3],
// by bisection; residual <= 1e-12. Requires l1 - 2*l3 > l2 + l4 >= 0.
double solve_eta(const StabilityParams& params);

// Which pair sum multiplies the exponential in the continuous rate equation;
// lambda23 is the alternate (l2 + l3) form, kept for comparison.
enum class GammaCoefficient { lambda24, lambda23 };

// Positive root of
//   [(1 - delta_bar)(l2 + l4) + eps] * exp(gamma * tau) = l1 - 2*l3 - eps - gamma
// by bisection on [0, l1 - 2*l3 - eps]; residual <= 1e-12.
double solve_gamma_star(const StabilityParams& params,
                        GammaCoefficient coefficient = GammaCoefficient::lambda24);

// Root C* > 1 of the discrete decay equation
//   J(C) = [(1-db)(l2+l4) + eps] * delta * C^{(m+1) delta}
//          + (1 - (l1 - 2*l3 - eps) * delta) * C^delta - 1.
// `m` defaults to ceil(tau / delta) when negative. log(C*) tends to gamma* as
// delta shrinks.
double solve_c_star(const StabilityParams& params, double delta, long m = -1);

// ---------------------------------------------------------------------------
// Sampling-based assumption checkers (falsification only: a pass means no
// violation was found, never that the condition is verified)
// ---------------------------------------------------------------------------

struct CheckReport {
    bool pass = false;
    double worst_violation = 0.0;           // raw max of LHS - RHS over all samples
    std::vector<double> per_regime_worst;   // raw, indexed by regime - 1
    Vec worst_x, worst_y;                   // witness of the raw worst
    int worst_regime = 0;
    long n_samples = 0;
};

// x^T F + ((p_bar-1)/2) |G|^2 <= k2 (1 + |x|^2 + |y|^2) on random points.
CheckReport check_khasminskii(const HybridSddeModel& model, double p_bar, double k2,
                              long n_samples, double box_radius, std::uint64_t stream);

// (x-x')^T (F-F') + ((q_bar-1)/2) |G-G'|^2 <= k7 (|x-x'|^2 + |y-y'|^2) on pairs.
CheckReport check_monotonicity(const HybridSddeModel& model, double q_bar, double k7,
                               long n_pairs, double box_radius, std::uint64_t stream);

// The split energy conditions
//   2 x^T F1 + (1+o)      |G1|^2 <= -l1 |x|^2 + l2 |y|^2
//   2 x^T F  + (1+1/o)    |G|^2  <=  l3 |x|^2 + l4 |y|^2
// with the degenerate conventions o in {0, inf} zeroing the matching weight
// term. Reports the worse of the two inequalities.
CheckReport check_stability_split(const HybridSddeModel& model, const StabilityParams& params,
                                  long n_samples, double box_radius, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Step-size condition report
// ---------------------------------------------------------------------------

struct RateCondition {
    bool holds = false;
    double lhs = 0.0; // cap(delta)
    double rhs = 0.0; // envelope((delta^{2v} v delta*cap^2)^{-1/(p-2)})
};

// Reported, never enforced; requires p > 2.
RateCondition rate_condition(const TruncationPolicy& policy, double holder_exponent, double p,
                             double delta);

} // namespace sdde::analysis

#endif // SDDE_ANALYSIS_HPP
