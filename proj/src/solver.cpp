#include "sdde/solver.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "sdde/errors.hpp"
#include "sdde/rng.hpp"

namespace sdde::solver {

namespace {

// Substream roles within a path: 0 = chain uniforms (see markov), 1 = Brownian.
constexpr std::uint64_t kBrownianSubstream = 1;

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

long checked_ratio(double coarse, double fine, const char* what) {
    const double q = coarse / fine;
    const long r = std::lround(q);
    if (r < 1 || std::fabs(q - static_cast<double>(r)) > 1e-9 * q)
        throw RejectedInputError(std::string(what) + ": not an integer multiple");
    return r;
}

} // namespace

double SimulationGrid::time(long k) const {
    if (k >= n_steps) return horizon;
    return static_cast<double>(k) * delta;
}

double SimulationGrid::dt(long k) const {
    if (uniform || k + 1 < n_steps) return delta;
    return horizon - static_cast<double>(k) * delta;
}

SimulationGrid make_grid(double delta, double horizon, double tau) {
    if (!(delta > 0.0)) throw RejectedInputError("grid: delta must be positive");
    if (!(horizon > 0.0)) throw RejectedInputError("grid: horizon must be positive");
    SimulationGrid grid;
    grid.delta = delta;
    grid.horizon = horizon;
    grid.n_steps = static_cast<long>(std::ceil(horizon / delta - 1e-9));
    grid.history_depth = static_cast<long>(std::ceil(tau / delta - 1e-9));
    grid.uniform =
        std::fabs(static_cast<double>(grid.n_steps) * delta - horizon) <= 1e-9 * horizon;
    return grid;
}

std::span<const double> PathRecord::state(long k) const {
    const long idx = k + grid.history_depth;
    return {states.data() + idx * state_dim, static_cast<std::size_t>(state_dim)};
}

std::span<double> PathRecord::state(long k) {
    const long idx = k + grid.history_depth;
    return {states.data() + idx * state_dim, static_cast<std::size_t>(state_dim)};
}

std::span<const double> PathRecord::step_state(double t) const {
    // Grid-point evaluations resolve to the grid index despite division fuzz.
    long k = static_cast<long>(std::floor(t / grid.delta + 1e-9));
    if (k > grid.n_steps) k = grid.n_steps;
    if (k < -grid.history_depth) k = -grid.history_depth;
    return state(k);
}

std::span<const double> PathRecord::delayed_step_state(double t, const model::DelayFn& delay) const {
    long k = static_cast<long>(std::floor(t / grid.delta + 1e-9));
    if (k < 0) k = 0;
    if (k > grid.n_steps) k = grid.n_steps;
    const double lag = std::max(delay(static_cast<double>(k) * grid.delta), 0.0);
    const long j = k - static_cast<long>(std::floor(lag / grid.delta));
    return state(std::max(j, -grid.history_depth));
}

void NoiseLadder::coarse_increment(long ratio, long k, std::span<double> out) const {
    for (int j = 0; j < noise_dim; ++j) out[j] = 0.0;
    const long base = k * ratio;
    for (long s = 0; s < ratio; ++s) {
        const double* inc = increments.data() + (base + s) * noise_dim;
        for (int j = 0; j < noise_dim; ++j) out[j] += inc[j];
    }
}

long delay_index(long k, double delta, const model::DelayFn& delay, double tau) {
    if (k < 0) throw RejectedInputError("delay_index: k must be nonnegative");
    const double raw = delay(static_cast<double>(k) * delta);
    const double lag = std::max(raw, 0.0); // documented clip of negative delays
    if (lag > tau * (1.0 + 1e-12) + 1e-15)
        throw ModelViolationError("delay_index: delay exceeds tau at step " + std::to_string(k));
    return k - static_cast<long>(std::floor(lag / delta));
}

namespace {

// Shared stepping core. `radius < 0` selects the raw (untruncated) scheme.
class Stepper {
public:
    Stepper(const HybridSddeModel& model, double radius)
        : model_(model),
          radius_(radius),
          n_(static_cast<std::size_t>(model.state_dim)),
          m_(static_cast<std::size_t>(model.noise_dim)),
          xc_(n_), yc_(n_), f_lip_(n_), f_sup_(n_), g_lip_(n_ * m_), g_sup_(n_ * m_) {}

    void step(std::span<const double> x, std::span<const double> y, int regime, double dt,
              std::span<const double> brownian_increment, std::span<double> out) {
        model_.lipschitz_drift(x, y, regime, f_lip_);
        model_.lipschitz_diffusion(x, y, regime, g_lip_);
        if (radius_ >= 0.0) {
            model::radial_clip(x, radius_, xc_);
            model::radial_clip(y, radius_, yc_);
            model_.super_drift(xc_, yc_, regime, f_sup_);
            model_.super_diffusion(xc_, yc_, regime, g_sup_);
        } else {
            model_.super_drift(x, y, regime, f_sup_);
            model_.super_diffusion(x, y, regime, g_sup_);
        }
        for (std::size_t i = 0; i < n_; ++i) {
            double v = x[i] + (f_lip_[i] + f_sup_[i]) * dt;
            for (std::size_t j = 0; j < m_; ++j)
                v += (g_lip_[i * m_ + j] + g_sup_[i * m_ + j]) * brownian_increment[j];
            out[i] = v;
        }
    }

private:
    const HybridSddeModel& model_;
    double radius_;
    std::size_t n_, m_;
    Vec xc_, yc_, f_lip_, f_sup_, g_lip_, g_sup_;
};

using IncrementProvider = std::function<void(long k, double dt, std::span<double> out)>;

// Fills the history segment and advances the recursion over the whole grid.
// Returns the step index at which the state became non-finite, if any.
std::optional<long> advance_path(const HybridSddeModel& model, double radius,
                                 const markov::RegimePath& regimes,
                                 const IncrementProvider& increments, PathRecord& record) {
    const SimulationGrid& grid = record.grid;

    // History: exact evaluations at grid times; the deepest point is clipped
    // into the history domain (it predates -tau only when tau/delta is not an
    // integer, and the delay lookup can never reach it).
    for (long k = -grid.history_depth; k <= 0; ++k) {
        const double t = std::max(static_cast<double>(k) * grid.delta, -model.tau);
        model.history(t, record.state(k));
    }

    Stepper stepper(model, radius);
    Vec increment(static_cast<std::size_t>(model.noise_dim));
    for (long k = 0; k < grid.n_steps; ++k) {
        const double dt = grid.dt(k);
        increments(k, dt, increment);
        const long j = delay_index(k, grid.delta, model.delay, model.tau);
        stepper.step(record.state(k), record.state(j), regimes.states[static_cast<std::size_t>(k)],
                     dt, increment, record.state(k + 1));
        if (!all_finite(record.state(k + 1))) return k;
    }
    return std::nullopt;
}

PathRecord make_record(const HybridSddeModel& model, const SimulationGrid& grid,
                       std::uint64_t seed, std::uint64_t path_id) {
    PathRecord record;
    record.grid = grid;
    record.state_dim = model.state_dim;
    record.states.assign(
        static_cast<std::size_t>(grid.history_depth + grid.n_steps + 1) * model.state_dim, 0.0);
    record.seed = seed;
    record.path_id = path_id;
    return record;
}

PathRecord run_single(const HybridSddeModel& model, const TruncationPolicy* policy,
                      double delta, double horizon, std::uint64_t seed, std::uint64_t path_id) {
    if (policy != nullptr && (!(delta > 0.0) || delta > policy->max_delta))
        throw RejectedInputError("simulate_path: delta outside (0, max_delta]");
    const SimulationGrid grid = make_grid(delta, horizon, model.tau);
    PathRecord record = make_record(model, grid, seed, path_id);
    record.regimes = markov::sample_regime_path(model.generator, delta, model.initial_regime,
                                                grid.n_steps, seed, path_id);

    RngStream gauss(seed, path_id, kBrownianSubstream);
    const IncrementProvider fresh = [&gauss](long, double dt, std::span<double> out) {
        const double scale = std::sqrt(dt);
        for (double& v : out) v = scale * gauss.next_gaussian();
    };

    const double radius = (policy != nullptr) ? model::truncation_radius(*policy, delta) : -1.0;
    if (auto blowup = advance_path(model, radius, record.regimes, fresh, record))
        throw NumericalBlowupError("path " + std::to_string(path_id) +
                                       " became non-finite at step " + std::to_string(*blowup),
                                   *blowup);
    return record;
}

} // namespace

Vec step_ptem(const Vec& x, const Vec& y, int regime, const HybridSddeModel& model,
              const TruncationPolicy& policy, double delta, const Vec& brownian_increment) {
    const double radius = model::truncation_radius(policy, delta);
    Stepper stepper(model, radius);
    Vec out(static_cast<std::size_t>(model.state_dim));
    stepper.step(x, y, regime, delta, brownian_increment, out);
    if (!all_finite(out)) throw NumericalBlowupError("step produced a non-finite state", 0);
    return out;
}

Vec step_em(const Vec& x, const Vec& y, int regime, const HybridSddeModel& model, double delta,
            const Vec& brownian_increment) {
    Stepper stepper(model, -1.0);
    Vec out(static_cast<std::size_t>(model.state_dim));
    stepper.step(x, y, regime, delta, brownian_increment, out);
    if (!all_finite(out)) throw NumericalBlowupError("step produced a non-finite state", 0);
    return out;
}

Vec evaluate_history(const HybridSddeModel& model, double t) {
    if (t < -model.tau * (1.0 + 1e-12) - 1e-15 || t > 1e-15)
        throw RejectedInputError("evaluate_history: t outside [-tau, 0]");
    Vec out(static_cast<std::size_t>(model.state_dim));
    model.history(std::min(0.0, std::max(t, -model.tau)), out);
    return out;
}

PathRecord simulate_path(const HybridSddeModel& model, const TruncationPolicy& policy,
                         double delta, double horizon, std::uint64_t seed,
                         std::uint64_t path_id) {
    return run_single(model, &policy, delta, horizon, seed, path_id);
}

PathRecord simulate_path_untruncated(const HybridSddeModel& model, double delta, double horizon,
                                     std::uint64_t seed, std::uint64_t path_id) {
    return run_single(model, nullptr, delta, horizon, seed, path_id);
}

CoupledRun simulate_coupled_outcomes(const HybridSddeModel& model,
                                     const TruncationPolicy& policy,
                                     const std::vector<double>& deltas, double horizon,
                                     std::uint64_t seed, std::uint64_t path_id) {
    if (deltas.empty()) throw RejectedInputError("simulate_coupled: no step sizes given");
    const double fine = deltas.front();
    if (!(fine > 0.0)) throw RejectedInputError("simulate_coupled: deltas must be positive");

    std::vector<long> ratios;
    ratios.reserve(deltas.size());
    for (const double d : deltas) {
        if (d < fine) throw RejectedInputError("simulate_coupled: deltas must be finest first");
        if (d > policy.max_delta)
            throw RejectedInputError("simulate_coupled: delta exceeds max_delta");
        ratios.push_back(checked_ratio(d, fine, "simulate_coupled: delta ladder"));
    }

    const long n_fine = checked_ratio(horizon, fine, "simulate_coupled: horizon/fine delta");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (n_fine % ratios[i] != 0)
            throw RejectedInputError("simulate_coupled: horizon is not a multiple of delta " +
                                     std::to_string(deltas[i]));
    }

    CoupledRun run;
    run.ladder.fine_delta = fine;
    run.ladder.noise_dim = model.noise_dim;
    run.ladder.ratios = ratios;
    run.ladder.increments.resize(static_cast<std::size_t>(n_fine) * model.noise_dim);
    RngStream gauss(seed, path_id, kBrownianSubstream);
    const double scale = std::sqrt(fine);
    for (double& v : run.ladder.increments) v = scale * gauss.next_gaussian();

    run.fine_regimes = markov::sample_regime_path(model.generator, fine, model.initial_regime,
                                                  n_fine, seed, path_id);

    for (std::size_t level = 0; level < deltas.size(); ++level) {
        const long ratio = ratios[level];
        const SimulationGrid grid = make_grid(deltas[level], horizon, model.tau);
        PathRecord record = make_record(model, grid, seed, path_id);
        record.regimes = markov::subsample_path(run.fine_regimes, ratio);

        const IncrementProvider shared = [&run, ratio](long k, double, std::span<double> out) {
            run.ladder.coarse_increment(ratio, k, out);
        };
        const double radius = model::truncation_radius(policy, deltas[level]);

        LevelOutcome outcome;
        if (auto blowup = advance_path(model, radius, record.regimes, shared, record))
            outcome.blowup_step = *blowup;
        else
            outcome.record = std::move(record);
        run.levels.push_back(std::move(outcome));
    }
    return run;
}

std::vector<PathRecord> simulate_coupled(const HybridSddeModel& model,
                                         const TruncationPolicy& policy,
                                         const std::vector<double>& deltas, double horizon,
                                         std::uint64_t seed, std::uint64_t path_id) {
    CoupledRun run = simulate_coupled_outcomes(model, policy, deltas, horizon, seed, path_id);
    std::vector<PathRecord> records;
    records.reserve(run.levels.size());
    for (std::size_t i = 0; i < run.levels.size(); ++i) {
        LevelOutcome& outcome = run.levels[i];
        if (outcome.blowup_step)
            throw NumericalBlowupError("coupled level " + std::to_string(i) +
                                           " became non-finite at step " +
                                           std::to_string(*outcome.blowup_step),
                                       *outcome.blowup_step);
        records.push_back(std::move(*outcome.record));
    }
    return records;
}

} // namespace sdde::solver
