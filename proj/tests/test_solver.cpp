#include <cmath>
#include <vector>

#include <doctest.h>

#include "sdde/errors.hpp"
#include "sdde/model.hpp"
#include "sdde/solver.hpp"

using namespace sdde;
using namespace sdde::model;
using namespace sdde::solver;

namespace {

// Scalar model with drift -x, no noise, no delay dependence; closed-form Euler.
BuiltinModel linear_decay_model() {
    BuiltinModel bundle = example_convergence_model();
    bundle.model.name = "linear-decay";
    bundle.model.history = [](double, std::span<double> out) { out[0] = 1.0; };
    bundle.model.lipschitz_drift = [](std::span<const double> x, std::span<const double>, int,
                                      std::span<double> out) { out[0] = -x[0]; };
    bundle.model.lipschitz_diffusion = [](std::span<const double>, std::span<const double>, int,
                                          std::span<double> out) { out[0] = 0.0; };
    bundle.model.super_drift = [](std::span<const double>, std::span<const double>, int,
                                  std::span<double> out) { out[0] = 0.0; };
    bundle.model.super_diffusion = [](std::span<const double>, std::span<const double>, int,
                                      std::span<double> out) { out[0] = 0.0; };
    return bundle;
}

BuiltinModel zero_model() {
    BuiltinModel bundle = linear_decay_model();
    bundle.model.name = "zero";
    bundle.model.lipschitz_drift = [](std::span<const double>, std::span<const double>, int,
                                      std::span<double> out) { out[0] = 0.0; };
    return bundle;
}

BuiltinModel shifted_history(BuiltinModel bundle, double value) {
    bundle.model.history = [value](double, std::span<double> out) { out[0] = value; };
    return bundle;
}

} // namespace

TEST_CASE("delay index arithmetic with the documented negative-delay clip") {
    const DelayFn cosine = [](double t) { return 0.1 * std::cos(t); };
    CHECK(delay_index(0, 0.01, cosine, 0.1) == -10);

    const DelayFn none = [](double) { return 0.0; };
    for (long k : {0L, 5L, 1234L}) CHECK(delay_index(k, 0.01, none, 0.1) == k);

    // t = 1.58: cos is slightly negative, the clip keeps the index at k.
    CHECK(delay_index(158, 0.01, cosine, 0.1) == 158);

    const DelayFn too_large = [](double) { return 0.25; };
    CHECK_THROWS_AS(delay_index(3, 0.01, too_large, 0.1), ModelViolationError);
    CHECK_THROWS_AS(delay_index(-1, 0.01, none, 0.1), RejectedInputError);
}

TEST_CASE("single steps: deterministic Euler arithmetic") {
    const BuiltinModel zero = zero_model();
    CHECK(step_ptem(Vec{1.5}, Vec{0.0}, 1, zero.model, zero.policy, 0.1, Vec{0.3})[0] == 1.5);

    const BuiltinModel lin = linear_decay_model();
    CHECK(step_ptem(Vec{1.0}, Vec{0.0}, 1, lin.model, lin.policy, 0.1, Vec{0.0})[0] ==
          doctest::Approx(0.9).epsilon(1e-15));

    BuiltinModel noisy = linear_decay_model();
    noisy.model.lipschitz_diffusion = [](std::span<const double>, std::span<const double>, int,
                                         std::span<double> out) { out[0] = 1.0; };
    CHECK(step_ptem(Vec{1.0}, Vec{0.0}, 1, noisy.model, noisy.policy, 0.1, Vec{0.2})[0] ==
          doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("classical EM equals the truncated step inside the ball and diverges outside") {
    const BuiltinModel bundle = example_convergence_model();

    // radius(1e-4) ~ 1.2: points inside the ball take the identity branch.
    const Vec inside_ptem =
        step_ptem(Vec{0.5}, Vec{0.3}, 2, bundle.model, bundle.policy, 1e-4, Vec{0.01});
    const Vec inside_em = step_em(Vec{0.5}, Vec{0.3}, 2, bundle.model, 1e-4, Vec{0.01});
    CHECK(inside_ptem[0] == inside_em[0]);

    // One raw step from x = y = 10 at delta = 0.1 jumps to about -1e4 ...
    const double em = step_em(Vec{10.0}, Vec{10.0}, 1, bundle.model, 0.1, Vec{0.0})[0];
    CHECK(em == doctest::Approx(10.0 + 0.1 * (-50.0 - 1e5)).epsilon(1e-12));
    CHECK(em < 0.0);
    CHECK(std::fabs(em) > 9.9e3);

    // ... while the truncated step stays within |x| + delta (|F1| + cap).
    const double cap = bundle.policy.cap(0.1);
    const double ptem =
        step_ptem(Vec{10.0}, Vec{10.0}, 1, bundle.model, bundle.policy, 0.1, Vec{0.0})[0];
    CHECK(ptem == doctest::Approx(10.0 + 0.1 * (-50.0 - cap)).epsilon(1e-12));
    CHECK(std::fabs(ptem) <= 10.0 + 0.1 * (50.0 + cap));
}

TEST_CASE("history evaluation is exact and domain-checked") {
    const BuiltinModel bundle = example_convergence_model();
    CHECK(evaluate_history(bundle.model, 0.0)[0] == 2.0);
    CHECK(evaluate_history(bundle.model, -0.1)[0] == 2.0);
    CHECK(evaluate_history(bundle.model, -0.04)[0] == 2.0);
    CHECK_THROWS_AS(evaluate_history(bundle.model, -0.2), RejectedInputError);
    CHECK_THROWS_AS(evaluate_history(bundle.model, 0.01), RejectedInputError);
}

TEST_CASE("paths of the zero model are constant and bit-reproducible") {
    const BuiltinModel bundle = zero_model();
    const PathRecord a = simulate_path(bundle.model, bundle.policy, 1e-2, 1.0, 42, 0);
    for (long k = -a.grid.history_depth; k <= a.grid.n_steps; ++k) CHECK(a.state(k)[0] == 1.0);
    CHECK(a.regimes.states.size() == static_cast<std::size_t>(a.grid.n_steps) + 1);

    const PathRecord b = simulate_path(bundle.model, bundle.policy, 1e-2, 1.0, 42, 0);
    CHECK(a.states == b.states);
    CHECK(a.regimes.states == b.regimes.states);

    // Distinct path ids draw distinct randomness (visible through the noise).
    const BuiltinModel noisy = example_convergence_model();
    const PathRecord n0 = simulate_path(noisy.model, noisy.policy, 1e-2, 1.0, 42, 0);
    const PathRecord n1 = simulate_path(noisy.model, noisy.policy, 1e-2, 1.0, 42, 1);
    CHECK(n0.states != n1.states);
}

TEST_CASE("history segment holds exact function evaluations") {
    BuiltinModel bundle = linear_decay_model();
    bundle.model.history = [](double t, std::span<double> out) { out[0] = 1.0 + t; };
    const double delta = 0.01;
    const PathRecord rec = simulate_path(bundle.model, bundle.policy, delta, 0.5, 3, 0);
    REQUIRE(rec.grid.history_depth == 10);
    for (long k = -rec.grid.history_depth; k <= 0; ++k)
        CHECK(rec.state(k)[0] == 1.0 + static_cast<double>(k) * delta);
}

TEST_CASE("step-process readout coincides with grid states") {
    const BuiltinModel bundle = example_convergence_model();
    const PathRecord rec = simulate_path(bundle.model, bundle.policy, 1e-2, 1.0, 5, 2);
    for (long k = 0; k <= rec.grid.n_steps; ++k) {
        CHECK(rec.step_state(rec.grid.time(k))[0] == rec.state(k)[0]);
        CHECK(rec.regimes.at_time(rec.grid.time(std::min(k, rec.grid.n_steps - 1))) ==
              rec.regime(std::min(k, rec.grid.n_steps - 1)));
    }
    // Mid-cell times read the left grid point.
    CHECK(rec.step_state(0.5 * 1e-2 + 3 * 1e-2)[0] == rec.state(3)[0]);
}

TEST_CASE("a shortened final step hits the horizon exactly") {
    const BuiltinModel bundle = linear_decay_model();
    const PathRecord rec = simulate_path(bundle.model, bundle.policy, 0.1, 0.25, 9, 0);
    CHECK(rec.grid.n_steps == 3);
    CHECK_FALSE(rec.grid.uniform);
    CHECK(rec.grid.time(3) == 0.25);
    // Euler product with steps 0.1, 0.1, 0.05.
    CHECK(rec.state(3)[0] == doctest::Approx(0.9 * 0.9 * 0.95).epsilon(1e-14));
}

TEST_CASE("second moments are stable across neighbouring resolutions") {
    const BuiltinModel bundle = example_convergence_model();
    const long n_paths = 500;
    double m_coarse = 0.0, m_fine = 0.0;
    for (long p = 0; p < n_paths; ++p) {
        const PathRecord coarse = simulate_path(bundle.model, bundle.policy, 1e-3, 1.0, 77, p);
        const PathRecord fine = simulate_path(bundle.model, bundle.policy, 5e-4, 1.0, 77, p);
        const double xc = coarse.state(coarse.grid.n_steps)[0];
        const double xf = fine.state(fine.grid.n_steps)[0];
        m_coarse += xc * xc;
        m_fine += xf * xf;
    }
    m_coarse /= static_cast<double>(n_paths);
    m_fine /= static_cast<double>(n_paths);
    CHECK(std::isfinite(m_coarse));
    CHECK(std::isfinite(m_fine));
    CHECK(m_coarse <= 2.0 * m_fine);
    CHECK(m_fine <= 2.0 * m_coarse);
}

TEST_CASE("coupled runs share noise and chain across resolutions") {
    const BuiltinModel bundle = example_convergence_model();
    const std::vector<double> deltas = {1e-3, 2e-3, 4e-3};
    const CoupledRun run =
        simulate_coupled_outcomes(bundle.model, bundle.policy, deltas, 1.0, 13, 4);
    REQUIRE(run.levels.size() == 3);
    for (const LevelOutcome& level : run.levels) REQUIRE(level.record.has_value());

    // Coarse Brownian increments are exact sums of their fine constituents.
    const NoiseLadder& ladder = run.ladder;
    Vec out(1);
    for (long k = 0; k < ladder.n_fine() / 4; ++k) {
        double manual = 0.0;
        for (long s = 4 * k; s < 4 * (k + 1); ++s) manual += ladder.increments[s];
        ladder.coarse_increment(4, k, out);
        CHECK(out[0] == manual);
    }

    // Every coarse regime equals the fine regime at the same physical time.
    for (std::size_t level = 0; level < deltas.size(); ++level) {
        const PathRecord& rec = *run.levels[level].record;
        const long ratio = ladder.ratios[level];
        for (long k = 0; k <= rec.grid.n_steps; ++k)
            CHECK(rec.regimes.states[static_cast<std::size_t>(k)] ==
                  run.fine_regimes.states[static_cast<std::size_t>(k * ratio)]);
    }

    // A one-level ladder reproduces simulate_path bit for bit.
    const std::vector<PathRecord> single =
        simulate_coupled(bundle.model, bundle.policy, {1e-3}, 1.0, 13, 4);
    const PathRecord direct = simulate_path(bundle.model, bundle.policy, 1e-3, 1.0, 13, 4);
    CHECK(single[0].states == direct.states);
    CHECK(single[0].regimes.states == direct.regimes.states);
}

TEST_CASE("coupled runs reject incompatible ladders") {
    const BuiltinModel bundle = example_convergence_model();
    CHECK_THROWS_AS(
        simulate_coupled(bundle.model, bundle.policy, {1e-3, 2.5e-3}, 1.0, 1, 0),
        RejectedInputError);
    CHECK_THROWS_AS(simulate_coupled(bundle.model, bundle.policy, {3e-4}, 1.0, 1, 0),
                    RejectedInputError);
    CHECK_THROWS_AS(simulate_coupled(bundle.model, bundle.policy, {}, 1.0, 1, 0),
                    RejectedInputError);
}

TEST_CASE("terminal gaps grow with the step size for most coupled paths") {
    const BuiltinModel bundle = example_convergence_model();
    const std::vector<double> deltas = {1e-4, 2e-4, 4e-4, 8e-4, 16e-4};
    const long n_paths = 500;
    long coarser_is_worse = 0;
    for (long p = 0; p < n_paths; ++p) {
        const CoupledRun run =
            simulate_coupled_outcomes(bundle.model, bundle.policy, deltas, 1.0, 101, p);
        const double ref = run.levels[0].record->state(run.levels[0].record->grid.n_steps)[0];
        const double second = run.levels[1].record->state(run.levels[1].record->grid.n_steps)[0];
        const double coarsest = run.levels[4].record->state(run.levels[4].record->grid.n_steps)[0];
        if (std::fabs(coarsest - ref) > std::fabs(second - ref)) ++coarser_is_worse;
    }
    CHECK(static_cast<double>(coarser_is_worse) / static_cast<double>(n_paths) > 0.6);
}

TEST_CASE("raw EM blows up from a large start while the truncated scheme stays finite") {
    const BuiltinModel bundle = shifted_history(example_convergence_model(), 10.0);
    bool blew_up = false;
    long blowup_step = -1;
    try {
        simulate_path_untruncated(bundle.model, 0.1, 5.0, 21, 0);
    } catch (const NumericalBlowupError& e) {
        blew_up = true;
        blowup_step = e.step();
    }
    CHECK(blew_up);
    CHECK(blowup_step < 50);

    const PathRecord safe = simulate_path(bundle.model, bundle.policy, 0.1, 5.0, 21, 0);
    for (long k = 0; k <= safe.grid.n_steps; ++k) CHECK(std::isfinite(safe.state(k)[0]));
}
