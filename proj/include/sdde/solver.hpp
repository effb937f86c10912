#ifndef SDDE_SOLVER_HPP
#define SDDE_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sdde/markov.hpp"
#include "sdde/model.hpp"

namespace sdde::solver {

using model::HybridSddeModel;
using model::TruncationPolicy;
using model::Vec;

// Uniform time grid with the history segment squeezed in before t = 0.
struct SimulationGrid {
    double delta = 0.0;
    double horizon = 0.0;
    long n_steps = 0;       // ceil(horizon / delta); the last step may be short
    long history_depth = 0; // ceil(tau / delta) grid points strictly before 0
    bool uniform = true;    // horizon is an integer multiple of delta

    // Time of grid index k (k may be negative); the terminal index maps to
    // exactly `horizon`.
    double time(long k) const;
    // Length of step k; equals delta everywhere except a shortened last step
    // on non-uniform grids.
    double dt(long k) const;
};

SimulationGrid make_grid(double delta, double horizon, double tau);

// One realized trajectory. State indices run from -history_depth to n_steps;
// indices <= 0 hold exact history evaluations.
struct PathRecord {
    SimulationGrid grid;
    int state_dim = 1;
    std::vector<double> states; // (history_depth + n_steps + 1) * state_dim, flat
    markov::RegimePath regimes; // regimes[k] for k = 0..n_steps
    std::uint64_t seed = 0;
    std::uint64_t path_id = 0;

    std::span<const double> state(long k) const;
    std::span<double> state(long k);
    // Piecewise-constant readouts of the current and delayed state.
    std::span<const double> step_state(double t) const;          // z1
    std::span<const double> delayed_step_state(double t, const model::DelayFn& delay) const; // z2
    int regime(long k) const { return regimes.states[static_cast<std::size_t>(k)]; }
};

// Brownian increments at the finest resolution plus the coarsening factors of
// a ladder. Coarse increments are exact prefix sums of fine ones.
struct NoiseLadder {
    double fine_delta = 0.0;
    int noise_dim = 1;
    std::vector<double> increments; // n_fine * noise_dim, flat
    std::vector<long> ratios;       // one per ladder level, ratios[0] == 1

    long n_fine() const { return static_cast<long>(increments.size()) / noise_dim; }
    // Sum of fine increments k*ratio .. (k+1)*ratio - 1 in index order.
    void coarse_increment(long ratio, long k, std::span<double> out) const;
};

// Grid index of the delayed state at step k: k - floor(delay(k*delta)/delta),
// with negative delay values clipped to zero. Throws ModelViolationError when
// the delay exceeds tau.
long delay_index(long k, double delta, const model::DelayFn& delay, double tau);

// One step of the truncated scheme: the Lipschitz parts see (x, y) as is, the
// super-linear parts see radially clipped arguments.
Vec step_ptem(const Vec& x, const Vec& y, int regime, const HybridSddeModel& model,
              const TruncationPolicy& policy, double delta, const Vec& brownian_increment);

// One classical Euler-Maruyama step on the raw coefficients (baseline; may
// blow up under super-linear growth).
Vec step_em(const Vec& x, const Vec& y, int regime, const HybridSddeModel& model,
            double delta, const Vec& brownian_increment);

// Exact history evaluation on [-tau, 0].
Vec evaluate_history(const HybridSddeModel& model, double t);

// Simulates one truncated-scheme path. Deterministic given all arguments;
// throws NumericalBlowupError if a state becomes non-finite.
PathRecord simulate_path(const HybridSddeModel& model, const TruncationPolicy& policy,
                         double delta, double horizon, std::uint64_t seed,
                         std::uint64_t path_id);

// Same path machinery on the raw coefficients (classical EM baseline).
PathRecord simulate_path_untruncated(const HybridSddeModel& model, double delta,
                                     double horizon, std::uint64_t seed,
                                     std::uint64_t path_id);

// Per-level outcome of a coupled run: either a record or the step at which the
// level blew up.
struct LevelOutcome {
    std::optional<PathRecord> record;
    std::optional<long> blowup_step;
};

struct CoupledRun {
    NoiseLadder ladder;
    markov::RegimePath fine_regimes;
    std::vector<LevelOutcome> levels; // one per delta, in input order
};

// Runs every level of the ladder on one shared Brownian path and one shared
// chain (generated at the finest delta and read at each level's grid).
// `deltas` is ordered finest first; every entry must be an integer multiple of
// the finest and the horizon an integer multiple of every delta.
CoupledRun simulate_coupled_outcomes(const HybridSddeModel& model,
                                     const TruncationPolicy& policy,
                                     const std::vector<double>& deltas, double horizon,
                                     std::uint64_t seed, std::uint64_t path_id);

// As above but throws NumericalBlowupError if any level blows up.
std::vector<PathRecord> simulate_coupled(const HybridSddeModel& model,
                                         const TruncationPolicy& policy,
                                         const std::vector<double>& deltas, double horizon,
                                         std::uint64_t seed, std::uint64_t path_id);

} // namespace sdde::solver

#endif // SDDE_SOLVER_HPP
