#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "sdde/errors.hpp"
#include "sdde/model.hpp"

using namespace sdde;
using namespace sdde::model;

namespace {

Vec drift_at(const HybridSddeModel& m, double x, double y, int regime) {
    Vec vx{x}, vy{y}, out(1);
    m.drift(vx, vy, regime, out);
    return out;
}

Vec diffusion_at(const HybridSddeModel& m, double x, double y, int regime) {
    Vec vx{x}, vy{y}, out(1);
    m.diffusion(vx, vy, regime, out);
    return out;
}

// Scalar two-regime family that provably satisfies the envelope condition for
// growth_envelope(w) = w^5: drift -a x^5 and diffusion b x^2 with a, b <= 1.
BuiltinModel dominated_family(double a1, double b1, double a2, double b2) {
    BuiltinModel bundle = example_convergence_model();
    bundle.model.name = "dominated-family";
    bundle.model.super_drift = [a1, a2](std::span<const double> x, std::span<const double>,
                                        int regime, std::span<double> out) {
        const double a = regime == 1 ? a1 : a2;
        out[0] = -a * std::pow(x[0], 5.0);
    };
    bundle.model.super_diffusion = [b1, b2](std::span<const double> x, std::span<const double>,
                                            int regime, std::span<double> out) {
        const double b = regime == 1 ? b1 : b2;
        out[0] = b * x[0] * x[0];
    };
    return bundle;
}

} // namespace

TEST_CASE("truncation radius follows the inverse-envelope composition") {
    const TruncationPolicy policy = example_convergence_model().policy;

    CHECK(truncation_radius(policy, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(truncation_radius(policy, 1e-4) == doctest::Approx(1.202264).epsilon(1e-6));
    // Composition equals delta^{-1/50} across the range.
    for (double d : {1e-6, 1e-4, 1e-2, 0.5, 1.0})
        CHECK(truncation_radius(policy, d) ==
              doctest::Approx(std::pow(d, -1.0 / 50.0)).epsilon(1e-13));

    CHECK_THROWS_AS(truncation_radius(policy, 0.0), RejectedInputError);
    CHECK_THROWS_AS(truncation_radius(policy, 1.5), RejectedInputError);
}

TEST_CASE("radial clip: identity inside, direction preserved outside, origin fixed") {
    CHECK(radial_clip(Vec{3.0, 4.0}, 5.0) == Vec{3.0, 4.0});
    CHECK(radial_clip(Vec{0.0, 0.0}, 2.0) == Vec{0.0, 0.0});

    const Vec clipped = radial_clip(Vec{3.0, 4.0}, 1.0);
    CHECK(clipped[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(clipped[1] == doctest::Approx(0.8).epsilon(1e-15));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::uniform_real_distribution<double> rad(0.1, 5.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const Vec x{coord(rng), coord(rng), coord(rng)};
        const double r = rad(rng);
        const Vec once = radial_clip(x, r);
        CHECK(radial_clip(once, r) == once); // idempotent, exactly
        const double nx = std::hypot(x[0], std::hypot(x[1], x[2]));
        const double nc = std::hypot(once[0], std::hypot(once[1], once[2]));
        CHECK(nc <= std::min(nx, r) * (1.0 + 1e-15)); // norm-contractive
    }
}

TEST_CASE("truncated parts saturate exactly at the cap on the first regime") {
    const BuiltinModel bundle = example_convergence_model();
    const double delta = 1e-4;

    const CoefficientParts parts =
        truncated_coefficient_parts(bundle.model, bundle.policy, delta, Vec{2.0}, Vec{0.0}, 1);
    CHECK(parts.drift_truncated[0] == doctest::Approx(-2.511886).epsilon(1e-6));
    // (delta^{-1/50})^5 = delta^{-1/10} = cap(delta) by construction.
    CHECK(parts.drift_truncated[0] ==
          doctest::Approx(-bundle.policy.cap(delta)).epsilon(1e-12));
    CHECK(parts.drift_lipschitz[0] == doctest::Approx(-12.0).epsilon(1e-12));

    // Inside the ball the super-linear part is untouched.
    const CoefficientParts inside =
        truncated_coefficient_parts(bundle.model, bundle.policy, delta, Vec{1.0}, Vec{0.5}, 1);
    CHECK(inside.drift_truncated[0] == doctest::Approx(-1.0).epsilon(1e-12));

    // A model with no super-linear part returns the Lipschitz pair unchanged.
    BuiltinModel plain = bundle;
    plain.model.super_drift = [](std::span<const double>, std::span<const double>, int,
                                 std::span<double> out) { out[0] = 0.0; };
    plain.model.super_diffusion = [](std::span<const double>, std::span<const double>, int,
                                     std::span<double> out) { out[0] = 0.0; };
    const auto [f, g] = truncated_coefficients(plain.model, plain.policy, delta, Vec{2.0},
                                               Vec{3.0}, 1);
    CHECK(f[0] == doctest::Approx(-12.0 + 3.0).epsilon(1e-12));
    CHECK(g[0] == 0.0);
}

TEST_CASE("truncated parts stay below the cap for envelope-dominated models") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coef(0.25, 1.0);
    std::uniform_real_distribution<double> point(-50.0, 50.0);
    std::uniform_int_distribution<int> pick_regime(1, 2);

    const BuiltinModel bundle =
        dominated_family(coef(rng), coef(rng), coef(rng), coef(rng));
    long checked = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const double delta = std::pow(10.0, -6.0 * (rep % 100) / 99.0); // log grid in (0, 1]
        const double bound = bundle.policy.cap(delta) * (1.0 + 1e-12);
        const Vec x{point(rng)}, y{point(rng)};
        const CoefficientParts parts = truncated_coefficient_parts(
            bundle.model, bundle.policy, delta, x, y, pick_regime(rng));
        CHECK(std::fabs(parts.drift_truncated[0]) <= bound);
        CHECK(std::fabs(parts.diffusion_truncated[0]) <= bound);
        ++checked;
    }
    CHECK(checked == 10000);
}

TEST_CASE("one-sided growth inequality holds on the convergence model") {
    const BuiltinModel bundle = example_convergence_model();
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> point(-1000.0, 1000.0);

    for (double p_bar : {2.0, 4.0, 8.0}) {
        const double k2 = (p_bar - 1.0) * (p_bar - 1.0) / 2.0;
        for (int rep = 0; rep < 10000; ++rep) {
            const double x = point(rng), y = point(rng);
            for (int regime = 1; regime <= 2; ++regime) {
                Vec f(1), g(1);
                bundle.model.super_drift(Vec{x}, Vec{y}, regime, f);
                bundle.model.super_diffusion(Vec{x}, Vec{y}, regime, g);
                const double lhs = x * f[0] + 0.5 * (p_bar - 1.0) * g[0] * g[0];
                CHECK(lhs <= k2 * (1.0 + x * x + y * y) * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("truncation preserves the one-sided growth inequality with a doubled constant") {
    const BuiltinModel bundle = example_convergence_model();
    const double p_bar = 4.0;
    const double k2 = (p_bar - 1.0) * (p_bar - 1.0) / 2.0;
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> point(-1000.0, 1000.0);

    for (int rep = 0; rep < 10000; ++rep) {
        const double delta = std::pow(10.0, -5.0 * (rep % 100) / 99.0);
        const double x = point(rng), y = point(rng);
        for (int regime = 1; regime <= 2; ++regime) {
            const CoefficientParts parts = truncated_coefficient_parts(
                bundle.model, bundle.policy, delta, Vec{x}, Vec{y}, regime);
            const double gd = parts.diffusion_truncated[0];
            const double lhs = x * parts.drift_truncated[0] + 0.5 * (p_bar - 1.0) * gd * gd;
            CHECK(lhs <= 2.0 * k2 * (1.0 + x * x + y * y) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("builtin convergence model matches its definition") {
    const BuiltinModel bundle = example_convergence_model();
    const HybridSddeModel& m = bundle.model;
    m.validate();

    CHECK(m.state_dim == 1);
    CHECK(m.noise_dim == 1);
    CHECK(m.n_regimes == 2);
    CHECK(m.generator.rates(0, 0) == -2.0);
    CHECK(m.generator.rates(0, 1) == 2.0);
    CHECK(m.generator.rates(1, 0) == 1.0);
    CHECK(m.generator.rates(1, 1) == -1.0);
    CHECK(m.tau == doctest::Approx(0.1));
    CHECK(m.delay_derivative_bound == doctest::Approx(0.1));
    CHECK(m.holder_exponent == 1.0);
    CHECK(m.initial_regime == 1);

    CHECK(drift_at(m, 1.0, 0.0, 1)[0] == doctest::Approx(-7.0).epsilon(1e-14));
    CHECK(diffusion_at(m, 0.0, 1.7, 2)[0] == doctest::Approx(0.0));
    CHECK(diffusion_at(m, 1.0, 1.0, 1)[0] == doctest::Approx(1.0));
    CHECK(drift_at(m, 1.0, 2.0, 2)[0] == doctest::Approx(-6.0 - 1.0 + 2.0 / 5.0).epsilon(1e-14));

    CHECK(m.delay(0.0) == doctest::Approx(0.1));
    CHECK(std::fabs(m.delay(3.14159265358979323846 / 2.0)) < 1e-12);

    Vec h(1);
    m.history(-0.05, h);
    CHECK(h[0] == 2.0);
}

TEST_CASE("builtin stability model carries the documented constants") {
    const BuiltinModel bundle = example_stability_model();
    const HybridSddeModel& m = bundle.model;
    m.validate();
    REQUIRE(bundle.stability.has_value());
    const analysis::StabilityParams& p = *bundle.stability;

    CHECK(p.lambda1 == 11.0);
    CHECK(p.lambda2 == 1.0);
    CHECK(p.lambda3 == 2.0);
    CHECK(p.lambda4 == 1.0);
    CHECK(p.delta_bar == doctest::Approx(0.1));
    CHECK(p.tau == doctest::Approx(0.1));
    CHECK(std::isinf(p.weight_o));
    p.validate();

    CHECK(p.lambda1 - 2.0 * p.lambda3 == doctest::Approx(7.0));
    CHECK((1.0 - p.delta_bar) * (p.lambda2 + p.lambda4) == doctest::Approx(1.8));

    // Second-regime diffusion is x sin^2(y).
    const double got = diffusion_at(m, 2.0, 0.7, 2)[0];
    CHECK(got == doctest::Approx(2.0 * std::sin(0.7) * std::sin(0.7)).epsilon(1e-14));

    // Energy identity of the Lipschitz pair: 2x F1 + |G1|^2 = -12x^2 + 2xy <= -11x^2 + y^2.
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> point(-100.0, 100.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const double x = point(rng), y = point(rng);
        Vec f1(1), g1(1);
        m.lipschitz_drift(Vec{x}, Vec{y}, 1, f1);
        m.lipschitz_diffusion(Vec{x}, Vec{y}, 1, g1);
        const double energy = 2.0 * x * f1[0] + g1[0] * g1[0];
        CHECK(energy == doctest::Approx(-12.0 * x * x + 2.0 * x * y).epsilon(1e-12));
        CHECK(energy <= (-11.0 * x * x + y * y) * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("policy validation reports") {
    // A model with no super-linear part passes vacuously under envelope(w) = w.
    BuiltinModel plain = example_convergence_model();
    plain.model.super_drift = [](std::span<const double>, std::span<const double>, int,
                                 std::span<double> out) { out[0] = 0.0; };
    plain.model.super_diffusion = [](std::span<const double>, std::span<const double>, int,
                                     std::span<double> out) { out[0] = 0.0; };
    TruncationPolicy linear;
    linear.growth_envelope = [](double w) { return w; };
    linear.growth_envelope_inv = [](double u) { return u; };
    linear.cap = [](double d) { return std::pow(d, -0.1); };
    linear.max_delta = 1.0;
    const PolicyReport vacuous = validate_policy(plain.model, linear, 4096, 1);
    CHECK(vacuous.pass);
    CHECK(vacuous.envelope_ok);

    // cap(delta) = delta^{-1/2} violates delta^{1/4} cap(delta) <= 1 at delta = 0.5.
    TruncationPolicy steep = linear;
    steep.cap = [](double d) { return std::pow(d, -0.5); };
    const PolicyReport bad_cap = validate_policy(plain.model, steep, 4096, 1);
    CHECK_FALSE(bad_cap.pass);
    CHECK_FALSE(bad_cap.quarter_power_ok);
    CHECK(bad_cap.quarter_power_worst > 0.0);

    // The convergence model's second-regime drift carries a bounded extra term
    // that a pure fifth-power envelope does not dominate near the unit ball;
    // the sampler finds the (at most 1/2) excess.
    const BuiltinModel builtin = example_convergence_model();
    const PolicyReport honest = validate_policy(builtin.model, builtin.policy, 20000, 1);
    CHECK_FALSE(honest.envelope_ok);
    CHECK(honest.envelope_worst_margin > 0.0);
    CHECK(honest.envelope_worst_margin <= 0.5 + 1e-9);
    CHECK(honest.envelope_worst_w < 2.0);
    CHECK(honest.cap_at_max_delta_ok);
    CHECK(honest.quarter_power_ok);
    CHECK(honest.inverse_ok);
}

TEST_CASE("model and constants validation reject malformed inputs") {
    BuiltinModel bundle = example_convergence_model();
    bundle.model.initial_regime = 5;
    CHECK_THROWS_AS(bundle.model.validate(), RejectedInputError);

    BuiltinModel slow = example_convergence_model();
    slow.model.delay = [](double) { return 0.2; }; // exceeds tau = 0.1
    CHECK_THROWS_AS(slow.model.validate(), ModelViolationError);

    ModelConstants constants = bundle.constants;
    constants.validate();
    constants.q_bar = 2.0;
    CHECK_THROWS_AS(constants.validate(), RejectedInputError);
    constants.q_bar = 4.0;
    constants.k2 = -1.0;
    CHECK_THROWS_AS(constants.validate(), RejectedInputError);

    CHECK_THROWS_AS(make_builtin("no-such-model"), RejectedInputError);
    CHECK(builtin_models().size() == 2);
}
