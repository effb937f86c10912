#include "sdde/markov.hpp"

#include <cmath>
#include <string>

#include "sdde/errors.hpp"
#include "sdde/rng.hpp"

namespace sdde::markov {

namespace {
constexpr double kRowSumTol = 1e-12;
constexpr double kEntryTol = 1e-12;
constexpr double kProbRowTol = 1e-10;
} // namespace

void Generator::validate() const {
    if (n_states < 1) throw RejectedInputError("generator: n_states must be positive");
    if (rates.rows() != static_cast<std::size_t>(n_states) ||
        rates.cols() != static_cast<std::size_t>(n_states))
        throw RejectedInputError("generator: rates must be N x N");
    for (int i = 0; i < n_states; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n_states; ++j) {
            row_sum += rates(i, j);
            if (i != j && rates(i, j) < 0.0)
                throw RejectedInputError("generator: negative off-diagonal rate at (" +
                                         std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        }
        if (std::fabs(row_sum) > kRowSumTol * std::max(1.0, rates.norm_inf()))
            throw RejectedInputError("generator: row " + std::to_string(i + 1) +
                                     " does not sum to zero");
    }
}

void TransitionMatrix::validate() const {
    if (n_states < 1 || probs.rows() != static_cast<std::size_t>(n_states) ||
        probs.cols() != static_cast<std::size_t>(n_states))
        throw RejectedInputError("transition matrix: shape mismatch");
    for (int i = 0; i < n_states; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n_states; ++j) {
            const double p = probs(i, j);
            if (p < -kEntryTol || p > 1.0 + kEntryTol)
                throw RejectedInputError("transition matrix: entry outside [0,1]");
            row_sum += p;
        }
        if (std::fabs(row_sum - 1.0) > kProbRowTol)
            throw RejectedInputError("transition matrix: row does not sum to one");
    }
}

int RegimePath::at_time(double t) const {
    // Nudge so exact grid times resolve to their own index despite division
    // round-off.
    long k = static_cast<long>(std::floor(t / delta + 1e-9));
    if (k < 0) k = 0;
    if (k >= static_cast<long>(states.size())) k = static_cast<long>(states.size()) - 1;
    return states[static_cast<std::size_t>(k)];
}

TransitionMatrix transition_matrix(const Generator& gen, double delta) {
    gen.validate();
    if (!(delta > 0.0)) throw RejectedInputError("transition_matrix: delta must be positive");

    TransitionMatrix out;
    out.n_states = gen.n_states;
    out.delta = delta;
    out.probs = expm(gen.rates.scaled(delta));

    // Clamp round-off negatives and renormalize rows so the cumulative
    // sampling rule stays well-defined.
    for (int i = 0; i < out.n_states; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < out.n_states; ++j) {
            double& p = out.probs(i, j);
            if (p < 0.0) {
                if (p < -kEntryTol)
                    throw RejectedInputError("transition_matrix: exponential produced a "
                                             "significantly negative probability");
                p = 0.0;
            }
            row_sum += p;
        }
        for (int j = 0; j < out.n_states; ++j) out.probs(i, j) /= row_sum;
    }
    out.validate();
    return out;
}

int sample_next_state(const TransitionMatrix& p, int current, double u) {
    if (current < 1 || current > p.n_states)
        throw RejectedInputError("sample_next_state: current state out of range");
    if (!(u >= 0.0 && u < 1.0))
        throw RejectedInputError("sample_next_state: u must lie in [0,1)");

    double cum = 0.0;
    for (int j = 1; j < p.n_states; ++j) {
        cum += p.probs(current - 1, j - 1);
        if (u < cum) return j;
    }
    // Overflow catch: also absorbs row-sum round-off.
    return p.n_states;
}

RegimePath sample_regime_path(const Generator& gen, double delta, int r0, long n_steps,
                              std::uint64_t seed, std::uint64_t stream_id) {
    if (n_steps < 0) throw RejectedInputError("sample_regime_path: n_steps must be >= 0");
    if (r0 < 1 || r0 > gen.n_states)
        throw RejectedInputError("sample_regime_path: initial state out of range");

    const TransitionMatrix p = transition_matrix(gen, delta);
    RegimePath path;
    path.delta = delta;
    path.states.reserve(static_cast<std::size_t>(n_steps) + 1);
    path.states.push_back(r0);

    RngStream uniforms(seed, stream_id, 0);
    int current = r0;
    for (long k = 0; k < n_steps; ++k) {
        current = sample_next_state(p, current, uniforms.next_uniform());
        path.states.push_back(current);
    }
    return path;
}

RegimePath subsample_path(const RegimePath& fine, long ratio) {
    if (ratio < 1) throw RejectedInputError("subsample_path: ratio must be >= 1");
    if (fine.states.empty()) throw RejectedInputError("subsample_path: empty path");

    RegimePath coarse;
    coarse.delta = fine.delta * static_cast<double>(ratio);
    for (std::size_t k = 0; k < fine.states.size(); k += static_cast<std::size_t>(ratio))
        coarse.states.push_back(fine.states[k]);
    return coarse;
}

std::vector<double> stationary_distribution(const Generator& gen) {
    gen.validate();
    const int n = gen.n_states;

    // pi * Gamma = 0 transposed, with the last equation replaced by sum(pi) = 1.
    Matrix a(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = gen.rates(j, i);
    for (int j = 0; j < n; ++j) a(n - 1, j) = 1.0;
    b[static_cast<std::size_t>(n) - 1] = 1.0;

    std::vector<double> pi;
    if (!lu_solve(a, b, pi))
        throw NoUniqueStationaryError("stationary_distribution: chain is reducible or the "
                                      "system is singular");

    double residual = 0.0;
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += pi[static_cast<std::size_t>(i)] * gen.rates(i, j);
        residual = std::max(residual, std::fabs(s));
        if (pi[static_cast<std::size_t>(j)] < -1e-12)
            throw NoUniqueStationaryError("stationary_distribution: negative component");
    }
    if (residual > 1e-10)
        throw NoUniqueStationaryError("stationary_distribution: residual too large");
    return pi;
}

} // namespace sdde::markov
