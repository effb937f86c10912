#include "sdde/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "sdde/errors.hpp"
#include "sdde/rng.hpp"

namespace sdde::analysis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sq_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// Runs f(p) for p in [0, n) on `workers` threads. Work items are pure and
// write to disjoint slots, so scheduling cannot affect results. The first
// exception raised by any item is rethrown after all workers join.
template <typename F>
void parallel_paths(long n, int workers, F&& f) {
    workers = std::max(1, workers);
    if (workers == 1 || n <= 1) {
        for (long p = 0; p < n; ++p) f(p);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        try {
            for (long p = next.fetch_add(1); p < n; p = next.fetch_add(1)) f(p);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    const int spawned = static_cast<int>(std::min<long>(workers, n));
    pool.reserve(static_cast<std::size_t>(spawned));
    for (int w = 0; w < spawned; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Bisection for a monotone increasing function with f(lo) <= 0 <= f(hi).
template <typename F>
double bisect_increasing(F&& f, double lo, double hi, double residual_tol, const char* what) {
    double root = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        root = 0.5 * (lo + hi);
        const double v = f(root);
        if (std::fabs(v) <= residual_tol) return root;
        if (v > 0.0)
            hi = root;
        else
            lo = root;
        if (hi - lo <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(hi)))
            break;
    }
    root = 0.5 * (lo + hi);
    if (std::fabs(f(root)) > residual_tol)
        throw Error(std::string(what) + ": bisection failed to reach the residual target");
    return root;
}

} // namespace

// --- StabilityParams -------------------------------------------------------

double StabilityParams::epsilon_limit() const {
    return 0.5 * (lambda1 - 2.0 * lambda3 - (1.0 - delta_bar) * (lambda2 + lambda4));
}

void StabilityParams::validate() const {
    if (!(delta_bar >= 0.0 && delta_bar < 1.0))
        throw RejectedInputError("stability params: delta_bar must lie in [0,1)");
    if (!(tau >= 0.0)) throw RejectedInputError("stability params: tau must be nonnegative");
    if (lambda2 < 0.0) throw RejectedInputError("stability params: lambda2 must be >= 0");
    if (!(lambda4 >= 0.0)) throw RejectedInputError("stability params: lambda4 must be >= 0");
    if (!(2.0 * lambda3 >= 2.0 * (1.0 - delta_bar) * lambda4))
        throw RejectedInputError("stability params: need 2*lambda3 >= 2*(1-delta_bar)*lambda4");
    if (!(lambda1 > 2.0 * lambda3))
        throw RejectedInputError("stability params: need lambda1 > 2*lambda3");
    if (weight_o < 0.0)
        throw RejectedInputError("stability params: weight_o must lie in [0, inf]");
    if (!(epsilon >= 0.0)) throw RejectedInputError("stability params: epsilon must be >= 0");
    if (!(epsilon < epsilon_limit()))
        throw RejectedInputError("stability params: epsilon exceeds the admissible margin "
                                 "(l1 - 2 l3 - (1-db)(l2+l4))/2");
}

// --- Strong-error ladder -----------------------------------------------------

ConvergenceStudyResult strong_error_study(const HybridSddeModel& model,
                                          const TruncationPolicy& policy,
                                          const std::vector<double>& deltas, double ref_delta,
                                          double horizon, long n_paths, std::uint64_t seed,
                                          int workers) {
    if (n_paths < 2) throw RejectedInputError("strong_error_study: n_paths must be >= 2");
    if (deltas.empty()) throw RejectedInputError("strong_error_study: no step sizes");
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i + 1]))
            throw RejectedInputError("strong_error_study: deltas must be strictly increasing");
    if (!(ref_delta > 0.0) || ref_delta > deltas.front())
        throw RejectedInputError("strong_error_study: ref_delta must be the finest step");

    std::vector<double> ladder;
    ladder.push_back(ref_delta);
    ladder.insert(ladder.end(), deltas.begin(), deltas.end());

    const std::size_t n_levels = deltas.size();
    // sq_err[p * n_levels + l] < 0 marks an unusable (blown-up) sample.
    std::vector<double> sq_err(static_cast<std::size_t>(n_paths) * n_levels, -1.0);
    std::vector<std::atomic<long>> level_blowups(n_levels);
    std::atomic<long> ref_blowups{0};

    parallel_paths(n_paths, workers, [&](long p) {
        solver::CoupledRun run = solver::simulate_coupled_outcomes(
            model, policy, ladder, horizon, seed, static_cast<std::uint64_t>(p));
        const solver::LevelOutcome& ref = run.levels.front();
        if (ref.blowup_step) {
            ref_blowups.fetch_add(1);
            return;
        }
        const auto ref_terminal = ref.record->state(ref.record->grid.n_steps);
        for (std::size_t l = 0; l < n_levels; ++l) {
            const solver::LevelOutcome& level = run.levels[l + 1];
            if (level.blowup_step) {
                level_blowups[l].fetch_add(1);
                continue;
            }
            const auto terminal = level.record->state(level.record->grid.n_steps);
            double s = 0.0;
            for (std::size_t i = 0; i < terminal.size(); ++i) {
                const double d = terminal[i] - ref_terminal[i];
                s += d * d;
            }
            sq_err[static_cast<std::size_t>(p) * n_levels + l] = s;
        }
    });

    ConvergenceStudyResult result;
    result.deltas = deltas;
    result.n_paths = n_paths;
    result.ref_blowups = ref_blowups.load();
    result.blowups.resize(n_levels);
    result.rms_errors.assign(n_levels, 0.0);

    for (std::size_t l = 0; l < n_levels; ++l) {
        result.blowups[l] = level_blowups[l].load();
        const long bad = result.blowups[l] + result.ref_blowups;
        if (bad * 100 > n_paths)
            throw StudyInvalidError("strong_error_study: more than 1% of paths blew up at "
                                    "delta " + std::to_string(deltas[l]));
        // Fixed path order keeps the reduction bit-reproducible.
        double sum = 0.0;
        long used = 0;
        for (long p = 0; p < n_paths; ++p) {
            const double s = sq_err[static_cast<std::size_t>(p) * n_levels + l];
            if (s >= 0.0) {
                sum += s;
                ++used;
            }
        }
        result.rms_errors[l] = used > 0 ? std::sqrt(sum / static_cast<double>(used)) : 0.0;
    }

    const RateFit fit = fit_rate(result.deltas, result.rms_errors);
    result.degenerate = fit.degenerate;
    result.slope = fit.slope;
    result.intercept = fit.intercept;
    result.slope_stderr = fit.slope_stderr;
    return result;
}

RateFit fit_rate(const std::vector<double>& deltas, const std::vector<double>& rms_errors) {
    RateFit fit;
    if (deltas.size() != rms_errors.size() || deltas.size() < 2) {
        fit.degenerate = true;
        fit.slope = fit.intercept = fit.slope_stderr = kNaN;
        return fit;
    }
    for (double e : rms_errors) {
        if (!(e > 0.0)) {
            fit.degenerate = true;
            fit.slope = fit.intercept = fit.slope_stderr = kNaN;
            return fit;
        }
    }

    const std::size_t n = deltas.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(deltas[i]);
        my += std::log(rms_errors[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(deltas[i]) - mx;
        const double dy = std::log(rms_errors[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    if (n > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::log(rms_errors[i]) -
                             (fit.intercept + fit.slope * std::log(deltas[i]));
            ssr += r * r;
        }
        fit.slope_stderr = std::sqrt(std::max(ssr, 0.0) / static_cast<double>(n - 2) / sxx);
    } else {
        fit.slope_stderr = 0.0;
    }
    return fit;
}

// --- Stability ---------------------------------------------------------------

double lyapunov_estimate(const solver::PathRecord& path) {
    const double norm = std::sqrt(sq_norm(path.state(path.grid.n_steps)));
    if (!std::isfinite(norm)) return kInf;
    if (norm == 0.0) return -kInf;
    return std::log(norm) / path.grid.horizon;
}

double lyapunov_regression_estimate(const solver::PathRecord& path, double burn_in_fraction) {
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw RejectedInputError("lyapunov_regression_estimate: burn-in must lie in [0,1)");
    const long start = static_cast<long>(
        std::ceil(burn_in_fraction * static_cast<double>(path.grid.n_steps)));

    double mx = 0.0, my = 0.0;
    long used = 0;
    for (long k = std::max<long>(start, 1); k <= path.grid.n_steps; ++k) {
        const double norm = std::sqrt(sq_norm(path.state(k)));
        if (!(norm > 0.0) || !std::isfinite(norm)) continue;
        mx += path.grid.time(k);
        my += std::log(norm);
        ++used;
    }
    if (used < 2) return kNaN;
    mx /= static_cast<double>(used);
    my /= static_cast<double>(used);

    double sxx = 0.0, sxy = 0.0;
    for (long k = std::max<long>(start, 1); k <= path.grid.n_steps; ++k) {
        const double norm = std::sqrt(sq_norm(path.state(k)));
        if (!(norm > 0.0) || !std::isfinite(norm)) continue;
        const double dx = path.grid.time(k) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(norm) - my);
    }
    if (sxx == 0.0) return kNaN;
    return sxy / sxx;
}

StabilityStudyResult stability_study(const HybridSddeModel& model,
                                     const TruncationPolicy& policy, double delta,
                                     double horizon, long n_paths, std::uint64_t seed,
                                     double burn_in_fraction,
                                     const std::optional<StabilityParams>& params,
                                     int workers) {
    if (n_paths < 1) throw RejectedInputError("stability_study: n_paths must be >= 1");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw RejectedInputError("stability_study: burn-in must lie in [0,1)");

    StabilityStudyResult result;
    result.per_path_exponents.assign(static_cast<std::size_t>(n_paths), 0.0);
    const bool with_regression = burn_in_fraction > 0.0;
    if (with_regression)
        result.per_path_regression.assign(static_cast<std::size_t>(n_paths), kNaN);
    std::atomic<long> blowups{0};

    parallel_paths(n_paths, workers, [&](long p) {
        double exponent;
        try {
            const solver::PathRecord record = solver::simulate_path(
                model, policy, delta, horizon, seed, static_cast<std::uint64_t>(p));
            exponent = lyapunov_estimate(record);
            if (with_regression)
                result.per_path_regression[static_cast<std::size_t>(p)] =
                    lyapunov_regression_estimate(record, burn_in_fraction);
        } catch (const NumericalBlowupError&) {
            exponent = kInf;
            blowups.fetch_add(1);
        }
        result.per_path_exponents[static_cast<std::size_t>(p)] = exponent;
    });

    result.blowups = blowups.load();
    long negative = 0;
    for (double e : result.per_path_exponents)
        if (e < 0.0) ++negative;
    result.fraction_negative = static_cast<double>(negative) / static_cast<double>(n_paths);

    std::vector<double> sorted = result.per_path_exponents;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    result.median_exponent = (sorted.size() % 2 == 1)
                                 ? sorted[mid]
                                 : 0.5 * (sorted[mid - 1] + sorted[mid]);

    if (params) {
        params->validate();
        result.eta = solve_eta(*params);
        result.gamma_star = solve_gamma_star(*params);
    } else {
        result.eta = kNaN;
        result.gamma_star = kNaN;
    }
    return result;
}

// --- Rate equations ----------------------------------------------------------

double solve_eta(const StabilityParams& params) {
    const double a = params.lambda1 - 2.0 * params.lambda3;
    const double b = params.lambda2 + params.lambda4;
    if (!(a > b) || b < 0.0)
        throw NoPositiveRootError("solve_eta: need lambda1 - 2*lambda3 > lambda2 + lambda4 >= 0");
    if (b == 0.0) return a;
    if (params.tau == 0.0) return a - b;

    const double tau = params.tau;
    return bisect_increasing([&](double eta) { return eta + b * std::exp(eta * tau) - a; },
                             0.0, a, 1e-12, "solve_eta");
}

double solve_gamma_star(const StabilityParams& params, GammaCoefficient coefficient) {
    const double lam = (coefficient == GammaCoefficient::lambda24) ? params.lambda4
                                                                   : params.lambda3;
    const double coef = (1.0 - params.delta_bar) * (params.lambda2 + lam) + params.epsilon;
    const double cap = params.lambda1 - 2.0 * params.lambda3 - params.epsilon;
    if (!(coef >= 0.0) || !(coef < cap))
        throw NoPositiveRootError("solve_gamma_star: no sign change on [0, l1 - 2 l3 - eps]");
    if (coef == 0.0) return cap;
    if (params.tau == 0.0) return cap - coef;

    const double tau = params.tau;
    return bisect_increasing(
        [&](double g) { return coef * std::exp(g * tau) - (cap - g); }, 0.0, cap, 1e-12,
        "solve_gamma_star");
}

double solve_c_star(const StabilityParams& params, double delta, long m) {
    if (!(delta > 0.0)) throw RejectedInputError("solve_c_star: delta must be positive");
    if (m < 0) m = static_cast<long>(std::ceil(params.tau / delta - 1e-9));

    const double decay = params.lambda1 - 2.0 * params.lambda3 - params.epsilon;
    if (decay > 0.0 && !(delta < 1.0 / decay))
        throw StepTooLargeError("solve_c_star: need delta < 1/(l1 - 2 l3 - eps)");
    const double coef =
        (1.0 - params.delta_bar) * (params.lambda2 + params.lambda4) + params.epsilon;

    const auto j = [&](double c) {
        return coef * delta * std::pow(c, static_cast<double>(m + 1) * delta) +
               (1.0 - decay * delta) * std::pow(c, delta) - 1.0;
    };
    if (!(j(1.0) < 0.0))
        throw MarginViolatedError("solve_c_star: J(1) >= 0; margin condition violated");

    double hi = 2.0;
    int grow = 0;
    while (j(hi) < 0.0) {
        hi *= 2.0;
        if (++grow > 200) throw Error("solve_c_star: failed to bracket the root");
    }
    return bisect_increasing(j, 1.0, hi, 1e-12, "solve_c_star");
}

// --- Checkers ----------------------------------------------------------------

namespace {

constexpr std::uint64_t kKhasminskiiStream = 101;
constexpr std::uint64_t kMonotoneStream = 102;
constexpr std::uint64_t kSplitStream = 103;

void sample_box(RngStream& rng, double radius, bool near_origin, std::span<double> out) {
    const double scale = near_origin ? 1e-3 : 1.0;
    for (double& v : out) v = scale * radius * (2.0 * rng.next_uniform() - 1.0);
}

struct WorstTracker {
    double worst = -kInf;
    Vec x, y;
    int regime = 0;
    // Violation normalized by the comparison scale; used for the verdict so
    // exact-equality margins are not flipped by round-off.
    double worst_normalized = -kInf;

    void update(double violation, double scale, std::span<const double> xs,
                std::span<const double> ys, int reg) {
        if (violation > worst) {
            worst = violation;
            x.assign(xs.begin(), xs.end());
            y.assign(ys.begin(), ys.end());
            regime = reg;
        }
        const double normalized = scale > 0.0 ? violation / scale : violation;
        worst_normalized = std::max(worst_normalized, normalized);
    }
};

} // namespace

CheckReport check_khasminskii(const HybridSddeModel& model, double p_bar, double k2,
                              long n_samples, double box_radius, std::uint64_t stream) {
    if (n_samples < 1) throw RejectedInputError("check_khasminskii: n_samples must be >= 1");
    const std::size_t n = static_cast<std::size_t>(model.state_dim);
    const std::size_t nm = n * static_cast<std::size_t>(model.noise_dim);
    Vec x(n), y(n), f(n), g(nm);

    RngStream rng(stream, kKhasminskiiStream, 0);
    WorstTracker tracker;
    std::vector<double> per_regime(static_cast<std::size_t>(model.n_regimes), -kInf);

    for (long s = 0; s < n_samples; ++s) {
        const bool near_origin = (s % 10 == 9);
        sample_box(rng, box_radius, near_origin, x);
        sample_box(rng, box_radius, near_origin, y);
        const double scale = 1.0 + sq_norm(x) + sq_norm(y);
        for (int regime = 1; regime <= model.n_regimes; ++regime) {
            model.super_drift(x, y, regime, f);
            model.super_diffusion(x, y, regime, g);
            double xf = 0.0;
            for (std::size_t i = 0; i < n; ++i) xf += x[i] * f[i];
            const double lhs = xf + 0.5 * (p_bar - 1.0) * sq_norm(g);
            const double violation = lhs - k2 * scale;
            per_regime[static_cast<std::size_t>(regime - 1)] =
                std::max(per_regime[static_cast<std::size_t>(regime - 1)], violation);
            tracker.update(violation, scale, x, y, regime);
        }
    }

    CheckReport report;
    report.n_samples = n_samples;
    report.worst_violation = tracker.worst;
    report.per_regime_worst = std::move(per_regime);
    report.worst_x = tracker.x;
    report.worst_y = tracker.y;
    report.worst_regime = tracker.regime;
    report.pass = tracker.worst_normalized <= 1e-12;
    return report;
}

CheckReport check_monotonicity(const HybridSddeModel& model, double q_bar, double k7,
                               long n_pairs, double box_radius, std::uint64_t stream) {
    if (n_pairs < 1) throw RejectedInputError("check_monotonicity: n_pairs must be >= 1");
    const std::size_t n = static_cast<std::size_t>(model.state_dim);
    const std::size_t nm = n * static_cast<std::size_t>(model.noise_dim);
    Vec x(n), y(n), xb(n), yb(n), f(n), fb(n), g(nm), gb(nm);

    RngStream rng(stream, kMonotoneStream, 0);
    WorstTracker tracker;
    std::vector<double> per_regime(static_cast<std::size_t>(model.n_regimes), -kInf);

    for (long s = 0; s < n_pairs; ++s) {
        const bool near_origin = (s % 10 == 9);
        sample_box(rng, box_radius, near_origin, x);
        sample_box(rng, box_radius, near_origin, y);
        sample_box(rng, box_radius, near_origin, xb);
        sample_box(rng, box_radius, near_origin, yb);

        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = x[i] - xb[i];
            const double dy = y[i] - yb[i];
            dist += dx * dx + dy * dy;
        }
        for (int regime = 1; regime <= model.n_regimes; ++regime) {
            model.super_drift(x, y, regime, f);
            model.super_drift(xb, yb, regime, fb);
            model.super_diffusion(x, y, regime, g);
            model.super_diffusion(xb, yb, regime, gb);

            double inner = 0.0;
            for (std::size_t i = 0; i < n; ++i) inner += (x[i] - xb[i]) * (f[i] - fb[i]);
            double gdiff = 0.0;
            for (std::size_t i = 0; i < nm; ++i) {
                const double d = g[i] - gb[i];
                gdiff += d * d;
            }
            const double violation = inner + 0.5 * (q_bar - 1.0) * gdiff - k7 * dist;
            per_regime[static_cast<std::size_t>(regime - 1)] =
                std::max(per_regime[static_cast<std::size_t>(regime - 1)], violation);
            tracker.update(violation, dist, x, y, regime);
        }
    }

    CheckReport report;
    report.n_samples = n_pairs;
    report.worst_violation = tracker.worst;
    report.per_regime_worst = std::move(per_regime);
    report.worst_x = tracker.x;
    report.worst_y = tracker.y;
    report.worst_regime = tracker.regime;
    report.pass = tracker.worst_normalized <= 1e-12;
    return report;
}

CheckReport check_stability_split(const HybridSddeModel& model, const StabilityParams& params,
                                  long n_samples, double box_radius, std::uint64_t stream) {
    if (n_samples < 1)
        throw RejectedInputError("check_stability_split: n_samples must be >= 1");
    const double o = params.weight_o;
    if (!(o >= 0.0)) throw RejectedInputError("check_stability_split: weight_o out of range");

    const std::size_t n = static_cast<std::size_t>(model.state_dim);
    const std::size_t nm = n * static_cast<std::size_t>(model.noise_dim);
    Vec x(n), y(n), f1(n), f(n), g1(nm), g(nm);

    RngStream rng(stream, kSplitStream, 0);
    WorstTracker tracker;
    std::vector<double> per_regime(static_cast<std::size_t>(model.n_regimes), -kInf);

    // Degenerate weight conventions: the o-scaled term is dropped at o = inf
    // (first inequality) and at o = 0 (second inequality).
    const bool o_inf = std::isinf(o);
    const double w1 = o_inf ? 1.0 : 1.0 + o;
    const double w2 = (o == 0.0) ? 1.0 : 1.0 + 1.0 / o;

    for (long s = 0; s < n_samples; ++s) {
        const bool near_origin = (s % 10 == 9);
        sample_box(rng, box_radius, near_origin, x);
        sample_box(rng, box_radius, near_origin, y);
        const double x2 = sq_norm(x);
        const double y2 = sq_norm(y);
        const double scale = x2 + y2;

        for (int regime = 1; regime <= model.n_regimes; ++regime) {
            model.lipschitz_drift(x, y, regime, f1);
            model.lipschitz_diffusion(x, y, regime, g1);
            model.super_drift(x, y, regime, f);
            model.super_diffusion(x, y, regime, g);

            double xf1 = 0.0, xf = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                xf1 += x[i] * f1[i];
                xf += x[i] * f[i];
            }
            const double v1 = 2.0 * xf1 + w1 * sq_norm(g1) -
                              (-params.lambda1 * x2 + params.lambda2 * y2);
            const double v2 = 2.0 * xf + w2 * sq_norm(g) -
                              (params.lambda3 * x2 + params.lambda4 * y2);
            const double violation = std::max(v1, v2);
            per_regime[static_cast<std::size_t>(regime - 1)] =
                std::max(per_regime[static_cast<std::size_t>(regime - 1)], violation);
            tracker.update(violation, scale, x, y, regime);
        }
    }

    CheckReport report;
    report.n_samples = n_samples;
    report.worst_violation = tracker.worst;
    report.per_regime_worst = std::move(per_regime);
    report.worst_x = tracker.x;
    report.worst_y = tracker.y;
    report.worst_regime = tracker.regime;
    report.pass = tracker.worst_normalized <= 1e-12;
    return report;
}

// --- Step-size condition -------------------------------------------------------

RateCondition rate_condition(const TruncationPolicy& policy, double holder_exponent, double p,
                             double delta) {
    if (!(p > 2.0)) throw RejectedInputError("rate_condition: p must be > 2");
    if (!(delta > 0.0) || delta > policy.max_delta)
        throw RejectedInputError("rate_condition: delta outside (0, max_delta]");

    RateCondition out;
    out.lhs = policy.cap(delta);
    const double order = std::max(std::pow(delta, 2.0 * holder_exponent),
                                  delta * out.lhs * out.lhs);
    out.rhs = policy.growth_envelope(std::pow(order, -1.0 / (p - 2.0)));
    out.holds = out.lhs >= out.rhs;
    return out;
}

} // namespace sdde::analysis
