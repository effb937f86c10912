#ifndef SDDE_MARKOV_HPP
#define SDDE_MARKOV_HPP

#include <cstdint>
#include <vector>

#include "sdde/linalg.hpp"

namespace sdde::markov {

// Generator matrix of a continuous-time Markov chain on states 1..N.
// Off-diagonal entries are nonnegative rates; every row sums to zero.
struct Generator {
    int n_states = 0;
    Matrix rates; // N x N

    // Throws RejectedInputError when the invariants fail.
    void validate() const;
};

// One-step transition probability matrix P(delta) = exp(delta * Gamma).
struct TransitionMatrix {
    int n_states = 0;
    Matrix probs; // N x N, rows sum to 1
    double delta = 0.0;

    void validate() const;
};

// Discrete chain read on a uniform grid: states[k] = r(k * delta), 1-based states.
struct RegimePath {
    double delta = 0.0;
    std::vector<int> states;

    // Step-process readout r(t) for t >= 0.
    int at_time(double t) const;
};

TransitionMatrix transition_matrix(const Generator& gen, double delta);

// Cumulative rule over row `current`: returns the first state j with
// sum_{i<j} P <= u < sum_{i<=j} P; state N catches any remaining mass.
int sample_next_state(const TransitionMatrix& p, int current, double u);

// Simulates states[0] = r0 and n_steps transitions with uniforms drawn from
// stream (seed, stream_id). Deterministic given all inputs.
RegimePath sample_regime_path(const Generator& gen, double delta, int r0, long n_steps,
                              std::uint64_t seed, std::uint64_t stream_id);

// Reads the fine path at every `ratio`-th index; result.delta = fine.delta * ratio.
// A tail that does not fill a full coarse step is dropped.
RegimePath subsample_path(const RegimePath& fine, long ratio);

// Solves pi * Gamma = 0 with sum(pi) = 1. Throws NoUniqueStationaryError when
// the chain is reducible (singular solve) or the solution is not a distribution.
std::vector<double> stationary_distribution(const Generator& gen);

} // namespace sdde::markov

#endif // SDDE_MARKOV_HPP
