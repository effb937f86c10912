#include "sdde/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdde/errors.hpp"
#include "sdde/io.hpp"
#include "sdde/solver.hpp"

namespace sdde::cli {

namespace {

using nlohmann::json;

constexpr const char* kArtifactVersion = "1.0.0";

[[noreturn]] void fail(const std::string& pointer, const std::string& msg) {
    throw ConfigError(pointer, msg);
}

const json& require_field(const json& j, const std::string& parent, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) fail(parent + "/" + key, "missing required field");
    return *it;
}

double require_number(const json& j, const std::string& parent, const char* key) {
    const json& v = require_field(j, parent, key);
    if (!v.is_number()) fail(parent + "/" + key, "must be a number");
    return v.get<double>();
}

double optional_number(const json& j, const std::string& parent, const char* key,
                       double fallback) {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) fail(parent + "/" + key, "must be a number");
    return it->get<double>();
}

long require_count(const json& j, const std::string& parent, const char* key, long minimum) {
    const json& v = require_field(j, parent, key);
    if (!v.is_number_integer()) fail(parent + "/" + key, "must be an integer");
    const long n = v.get<long>();
    if (n < minimum)
        fail(parent + "/" + key, "must be >= " + std::to_string(minimum));
    return n;
}

void check_delta(double delta, double max_delta, const std::string& pointer) {
    if (!(delta > 0.0))
        fail(pointer, "step size must be positive");
    if (delta > max_delta)
        fail(pointer, "step size exceeds the policy's max delta " +
                          io::format_double(max_delta));
}

analysis::StabilityParams parse_stability_params(const json& j, const std::string& parent) {
    analysis::StabilityParams p;
    p.lambda1 = require_number(j, parent, "lambda1");
    p.lambda2 = require_number(j, parent, "lambda2");
    p.lambda3 = require_number(j, parent, "lambda3");
    p.lambda4 = require_number(j, parent, "lambda4");
    p.delta_bar = require_number(j, parent, "delta_bar");
    p.tau = require_number(j, parent, "tau");
    p.epsilon = require_number(j, parent, "epsilon");
    const auto o = j.find("weight_o");
    if (o == j.end()) {
        p.weight_o = std::numeric_limits<double>::infinity();
    } else if (o->is_string()) {
        const std::string s = o->get<std::string>();
        if (s != "inf" && s != "infinity") fail(parent + "/weight_o", "must be a number or \"inf\"");
        p.weight_o = std::numeric_limits<double>::infinity();
    } else if (o->is_number()) {
        p.weight_o = o->get<double>();
    } else {
        fail(parent + "/weight_o", "must be a number or \"inf\"");
    }
    try {
        p.validate();
    } catch (const RejectedInputError& e) {
        fail(parent, e.what());
    }
    return p;
}

json stability_params_json(const analysis::StabilityParams& p) {
    json j = {
        {"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"lambda3", p.lambda3},
        {"lambda4", p.lambda4}, {"delta_bar", p.delta_bar}, {"tau", p.tau},
        {"epsilon", p.epsilon},
    };
    if (std::isinf(p.weight_o))
        j["weight_o"] = "inf";
    else
        j["weight_o"] = p.weight_o;
    return j;
}

} // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("/", "cannot open config file " + path);
    json root;
    try {
        in >> root;
    } catch (const json::parse_error& e) {
        fail("/", std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) fail("/", "config must be a JSON object");

    ExperimentConfig cfg;

    // `model` is either a builtin name or an object naming a builtin plus
    // numeric parameter overrides (generator, constant history, start regime).
    // Coefficients themselves are always code-registered callables.
    const json& model_field = require_field(root, "", "model");
    const json* overrides = nullptr;
    if (model_field.is_string()) {
        cfg.model_name = model_field.get<std::string>();
    } else if (model_field.is_object()) {
        const json& name = require_field(model_field, "/model", "name");
        if (!name.is_string()) fail("/model/name", "must be a builtin model name");
        cfg.model_name = name.get<std::string>();
        overrides = &model_field;
    } else {
        fail("/model", "must be a builtin model name or an object with a \"name\"");
    }
    try {
        cfg.bundle = model::make_builtin(cfg.model_name);
    } catch (const RejectedInputError&) {
        fail("/model", "unknown model \"" + cfg.model_name + "\"");
    }
    if (overrides != nullptr) {
        if (const auto g = overrides->find("generator"); g != overrides->end()) {
            const int n = cfg.bundle.model.n_regimes;
            if (!g->is_array() || static_cast<int>(g->size()) != n)
                fail("/model/generator", "must be an N x N array of rates (N = " +
                                             std::to_string(n) + ")");
            Matrix rates(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const json& row = (*g)[static_cast<std::size_t>(i)];
                if (!row.is_array() || static_cast<int>(row.size()) != n)
                    fail("/model/generator/" + std::to_string(i), "must have N entries");
                for (int j = 0; j < n; ++j) {
                    const json& v = row[static_cast<std::size_t>(j)];
                    if (!v.is_number())
                        fail("/model/generator/" + std::to_string(i) + "/" + std::to_string(j),
                             "must be a number");
                    rates(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                        v.get<double>();
                }
            }
            cfg.bundle.model.generator.rates = rates;
            try {
                cfg.bundle.model.generator.validate();
            } catch (const RejectedInputError& e) {
                fail("/model/generator", e.what());
            }
        }
        if (const auto h = overrides->find("history_value"); h != overrides->end()) {
            if (!h->is_number()) fail("/model/history_value", "must be a number");
            const double value = h->get<double>();
            cfg.bundle.model.history = [value](double, std::span<double> out) {
                for (double& v : out) v = value;
            };
        }
        if (const auto r = overrides->find("initial_regime"); r != overrides->end()) {
            if (!r->is_number_integer()) fail("/model/initial_regime", "must be an integer");
            const int regime = r->get<int>();
            if (regime < 1 || regime > cfg.bundle.model.n_regimes)
                fail("/model/initial_regime", "must lie in 1..N");
            cfg.bundle.model.initial_regime = regime;
        }
    }
    const double max_delta = cfg.bundle.policy.max_delta;

    // Reproducibility is mandatory: no entropy-based seed default.
    const json& seed_field = require_field(root, "", "seed");
    if (!seed_field.is_number_integer() ||
        (seed_field.is_number_integer() && !seed_field.is_number_unsigned() &&
         seed_field.get<long long>() < 0))
        fail("/seed", "must be a nonnegative integer");
    cfg.seed = seed_field.get<std::uint64_t>();

    if (const auto it = root.find("output_dir"); it != root.end()) {
        if (!it->is_string()) fail("/output_dir", "must be a string");
        cfg.output_dir = it->get<std::string>();
    }

    if (const auto it = root.find("workers"); it != root.end()) {
        if (it->is_string()) {
            if (it->get<std::string>() != "auto") fail("/workers", "must be an integer or \"auto\"");
            cfg.workers = 0;
        } else if (it->is_number_integer()) {
            const long w = it->get<long>();
            if (w < 1) fail("/workers", "must be >= 1");
            cfg.workers = static_cast<int>(w);
        } else {
            fail("/workers", "must be an integer or \"auto\"");
        }
    }

    if (const auto it = root.find("stability_params"); it != root.end()) {
        if (!it->is_object()) fail("/stability_params", "must be an object");
        cfg.stability_params = parse_stability_params(*it, "/stability_params");
    } else if (cfg.bundle.stability) {
        cfg.stability_params = cfg.bundle.stability;
    }

    if (const auto it = root.find("simulate"); it != root.end()) {
        const std::string at = "/simulate";
        SimulateBlock b;
        b.delta = require_number(*it, at, "delta");
        check_delta(b.delta, max_delta, at + "/delta");
        b.horizon = require_number(*it, at, "horizon");
        if (!(b.horizon > 0.0)) fail(at + "/horizon", "must be positive");
        b.n_paths = require_count(*it, at, "n_paths", 1);
        cfg.simulate = b;
    }

    if (const auto it = root.find("converge"); it != root.end()) {
        const std::string at = "/converge";
        ConvergeBlock b;
        const json& deltas = require_field(*it, at, "deltas");
        if (!deltas.is_array() || deltas.empty()) fail(at + "/deltas", "must be a nonempty array");
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            const std::string ptr = at + "/deltas/" + std::to_string(i);
            if (!deltas[i].is_number()) fail(ptr, "must be a number");
            const double d = deltas[i].get<double>();
            check_delta(d, max_delta, ptr);
            if (!b.deltas.empty() && !(d > b.deltas.back()))
                fail(ptr, "deltas must be strictly increasing");
            b.deltas.push_back(d);
        }
        b.ref_delta = require_number(*it, at, "ref_delta");
        check_delta(b.ref_delta, max_delta, at + "/ref_delta");
        if (b.ref_delta > b.deltas.front())
            fail(at + "/ref_delta", "must not exceed the finest study delta");
        b.horizon = require_number(*it, at, "horizon");
        if (!(b.horizon > 0.0)) fail(at + "/horizon", "must be positive");
        b.n_paths = require_count(*it, at, "n_paths", 2);
        b.p = optional_number(*it, at, "p", 4.0);
        if (!(b.p > 2.0)) fail(at + "/p", "must be > 2");
        cfg.converge = b;
    }

    if (const auto it = root.find("stability"); it != root.end()) {
        const std::string at = "/stability";
        StabilityBlock b;
        b.delta = require_number(*it, at, "delta");
        check_delta(b.delta, max_delta, at + "/delta");
        b.horizon = require_number(*it, at, "horizon");
        if (!(b.horizon > 0.0)) fail(at + "/horizon", "must be positive");
        b.n_paths = require_count(*it, at, "n_paths", 1);
        b.burn_in_fraction = optional_number(*it, at, "burn_in_fraction", 0.0);
        if (!(b.burn_in_fraction >= 0.0 && b.burn_in_fraction < 1.0))
            fail(at + "/burn_in_fraction", "must lie in [0,1)");
        if (const auto p = it->find("stability_params"); p != it->end()) {
            if (!p->is_object()) fail(at + "/stability_params", "must be an object");
            b.params = parse_stability_params(*p, at + "/stability_params");
        }
        cfg.stability = b;
    }

    if (const auto it = root.find("roots"); it != root.end()) {
        const std::string at = "/roots";
        RootsBlock b;
        if (const auto d = it->find("deltas"); d != it->end()) {
            if (!d->is_array()) fail(at + "/deltas", "must be an array");
            for (std::size_t i = 0; i < d->size(); ++i) {
                const std::string ptr = at + "/deltas/" + std::to_string(i);
                if (!(*d)[i].is_number()) fail(ptr, "must be a number");
                const double v = (*d)[i].get<double>();
                check_delta(v, max_delta, ptr);
                b.deltas.push_back(v);
            }
        }
        if (const auto f = it->find("report_l2l3_gamma"); f != it->end()) {
            if (!f->is_boolean()) fail(at + "/report_l2l3_gamma", "must be a boolean");
            b.report_l2l3_gamma = f->get<bool>();
        }
        if (const auto p = it->find("stability_params"); p != it->end()) {
            if (!p->is_object()) fail(at + "/stability_params", "must be an object");
            b.params = parse_stability_params(*p, at + "/stability_params");
        }
        cfg.roots = b;
    }

    if (const auto it = root.find("check"); it != root.end()) {
        const std::string at = "/check";
        CheckBlock b;
        if (const auto c = it->find("checkers"); c != it->end()) {
            if (!c->is_array()) fail(at + "/checkers", "must be an array of names");
            for (std::size_t i = 0; i < c->size(); ++i) {
                if (!(*c)[i].is_string())
                    fail(at + "/checkers/" + std::to_string(i), "must be a string");
                const std::string name = (*c)[i].get<std::string>();
                if (name != "khasminskii" && name != "monotonicity" && name != "stability-split")
                    fail(at + "/checkers/" + std::to_string(i), "unknown checker \"" + name + "\"");
                b.checkers.push_back(name);
            }
        }
        if (const auto f = it->find("n_samples"); f != it->end())
            b.n_samples = require_count(*it, at, "n_samples", 1);
        b.box_radius = optional_number(*it, at, "box_radius", 1000.0);
        if (!(b.box_radius > 0.0)) fail(at + "/box_radius", "must be positive");
        if (const auto f = it->find("stream"); f != it->end()) {
            if (!f->is_number_integer()) fail(at + "/stream", "must be an integer");
            b.stream = f->get<std::uint64_t>();
        }
        if (it->contains("p_bar")) b.p_bar = require_number(*it, at, "p_bar");
        if (it->contains("k2")) b.k2 = require_number(*it, at, "k2");
        if (it->contains("q_bar")) b.q_bar = require_number(*it, at, "q_bar");
        if (it->contains("k7")) b.k7 = require_number(*it, at, "k7");
        cfg.check = b;
    }

    // Resolved echo for the manifest (inline model overrides kept verbatim).
    json resolved = root;
    if (overrides == nullptr) resolved["model"] = cfg.model_name;
    resolved["seed"] = cfg.seed;
    resolved["output_dir"] = cfg.output_dir;
    resolved["workers"] = cfg.workers == 0 ? json("auto") : json(cfg.workers);
    if (cfg.stability_params)
        resolved["stability_params"] = stability_params_json(*cfg.stability_params);
    cfg.resolved_json = resolved.dump(2);

    return cfg;
}

namespace {

int resolve_workers(int configured) {
    if (configured >= 1) return configured;
    if (const char* env = std::getenv("HYBRID_SDDE_WORKERS")) {
        const long w = std::strtol(env, nullptr, 10);
        if (w >= 1) return static_cast<int>(w);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? static_cast<int>(hw) : 1;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command, int workers) {
    json manifest = {
        {"artifact_version", kArtifactVersion},
        {"command", command},
        {"seed", cfg.seed},
        {"workers", workers},
        {"config", json::parse(cfg.resolved_json)},
    };
    io::write_file(cfg.output_dir + "/manifest.json", manifest.dump(2) + "\n");
}

void prepare_output(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
}

json check_report_json(const analysis::CheckReport& report) {
    return json{
        {"pass", report.pass},
        {"worst_violation", report.worst_violation},
        {"per_regime_worst", report.per_regime_worst},
        {"worst_x", report.worst_x},
        {"worst_y", report.worst_y},
        {"worst_regime", report.worst_regime},
        {"n_samples", report.n_samples},
    };
}

int run_simulate(const ExperimentConfig& cfg, int workers) {
    const SimulateBlock& blk = *cfg.simulate;
    const model::HybridSddeModel& model = cfg.bundle.model;

    std::vector<std::optional<solver::PathRecord>> records(
        static_cast<std::size_t>(blk.n_paths));
    std::vector<std::thread> pool;
    std::atomic<long> next{0};
    std::atomic<long> blowups{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        try {
            for (long p = next.fetch_add(1); p < blk.n_paths; p = next.fetch_add(1)) {
                try {
                    records[static_cast<std::size_t>(p)] =
                        solver::simulate_path(model, cfg.bundle.policy, blk.delta, blk.horizon,
                                              cfg.seed, static_cast<std::uint64_t>(p));
                } catch (const NumericalBlowupError&) {
                    blowups.fetch_add(1);
                }
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    const int spawn = std::max(1, static_cast<int>(std::min<long>(workers, blk.n_paths)));
    for (int w = 0; w < spawn; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    std::ostringstream csv;
    csv << "path_id,t";
    for (int i = 1; i <= model.state_dim; ++i) csv << ",x_" << i;
    csv << ",regime\n";
    for (long p = 0; p < blk.n_paths; ++p) {
        const auto& rec = records[static_cast<std::size_t>(p)];
        if (!rec) continue;
        for (long k = -rec->grid.history_depth; k <= rec->grid.n_steps; ++k) {
            csv << p << ',' << io::format_double(rec->grid.time(k));
            for (double v : rec->state(k)) csv << ',' << io::format_double(v);
            // History rows predate the chain; they carry the initial regime.
            const int regime = k <= 0 ? model.initial_regime
                                      : rec->regimes.states[static_cast<std::size_t>(k)];
            csv << ',' << regime << '\n';
        }
    }
    io::write_file(cfg.output_dir + "/paths.csv", csv.str());

    json summary = {
        {"command", "simulate"},
        {"model", cfg.model_name},
        {"delta", blk.delta},
        {"horizon", blk.horizon},
        {"n_paths", blk.n_paths},
        {"blowups", blowups.load()},
    };
    io::write_file(cfg.output_dir + "/summary.json", summary.dump(2) + "\n");
    std::cout << "simulate: " << blk.n_paths << " paths at delta " << io::format_double(blk.delta)
              << ", " << blowups.load() << " blowups -> " << cfg.output_dir << "\n";
    return 0;
}

int run_converge(const ExperimentConfig& cfg, int workers) {
    const ConvergeBlock& blk = *cfg.converge;
    const analysis::ConvergenceStudyResult res = analysis::strong_error_study(
        cfg.bundle.model, cfg.bundle.policy, blk.deltas, blk.ref_delta, blk.horizon,
        blk.n_paths, cfg.seed, workers);

    std::ostringstream csv;
    csv << "delta,rms_error,n_paths,blowups\n";
    for (std::size_t l = 0; l < res.deltas.size(); ++l) {
        const long excluded = res.blowups[l] + res.ref_blowups;
        csv << io::format_double(res.deltas[l]) << ',' << io::format_double(res.rms_errors[l])
            << ',' << (res.n_paths - excluded) << ',' << excluded << '\n';
    }
    io::write_file(cfg.output_dir + "/errors.csv", csv.str());

    json rate_cond = json::array();
    for (double d : res.deltas) {
        const analysis::RateCondition rc =
            analysis::rate_condition(cfg.bundle.policy, cfg.bundle.model.holder_exponent,
                                     blk.p, d);
        rate_cond.push_back({{"delta", d}, {"holds", rc.holds}, {"lhs", rc.lhs}, {"rhs", rc.rhs}});
    }

    json summary = {
        {"command", "converge"},
        {"model", cfg.model_name},
        {"ref_delta", blk.ref_delta},
        {"horizon", blk.horizon},
        {"n_paths", res.n_paths},
        {"deltas", res.deltas},
        {"rms_errors", res.rms_errors},
        {"blowups", res.blowups},
        {"ref_blowups", res.ref_blowups},
        {"degenerate", res.degenerate},
        {"slope", res.slope},
        {"intercept", res.intercept},
        {"slope_stderr", res.slope_stderr},
        {"rate_condition", {{"p", blk.p}, {"levels", rate_cond}}},
    };
    io::write_file(cfg.output_dir + "/summary.json", summary.dump(2) + "\n");
    if (res.degenerate)
        std::cout << "converge: degenerate study (zero errors) -> " << cfg.output_dir << "\n";
    else
        std::cout << "converge: slope " << io::format_double(res.slope) << " +/- "
                  << io::format_double(res.slope_stderr) << " over " << res.deltas.size()
                  << " levels -> " << cfg.output_dir << "\n";
    return 0;
}

int run_stability(const ExperimentConfig& cfg, int workers) {
    const StabilityBlock& blk = *cfg.stability;
    const auto& params = blk.params ? blk.params : cfg.stability_params;
    const analysis::StabilityStudyResult res = analysis::stability_study(
        cfg.bundle.model, cfg.bundle.policy, blk.delta, blk.horizon, blk.n_paths, cfg.seed,
        blk.burn_in_fraction, params, workers);

    std::ostringstream csv;
    csv << "path_id,exponent\n";
    for (std::size_t p = 0; p < res.per_path_exponents.size(); ++p)
        csv << p << ',' << io::format_double(res.per_path_exponents[p]) << '\n';
    io::write_file(cfg.output_dir + "/stability.csv", csv.str());

    json summary = {
        {"command", "stability"},
        {"model", cfg.model_name},
        {"delta", blk.delta},
        {"horizon", blk.horizon},
        {"n_paths", blk.n_paths},
        {"blowups", res.blowups},
        {"burn_in_fraction", blk.burn_in_fraction},
        {"fraction_negative", res.fraction_negative},
        {"median_exponent", res.median_exponent},
        {"eta", res.eta},
        {"gamma_star", res.gamma_star},
    };
    if (!res.per_path_regression.empty()) {
        std::vector<double> reg = res.per_path_regression;
        std::sort(reg.begin(), reg.end());
        summary["median_regression_exponent"] = reg[reg.size() / 2];
    }
    io::write_file(cfg.output_dir + "/summary.json", summary.dump(2) + "\n");
    std::cout << "stability: " << io::format_double(100.0 * res.fraction_negative)
              << "% negative exponents, median " << io::format_double(res.median_exponent)
              << " -> " << cfg.output_dir << "\n";
    return 0;
}

int run_roots(const ExperimentConfig& cfg) {
    const RootsBlock& blk = *cfg.roots;
    const auto& effective = blk.params ? blk.params : cfg.stability_params;
    if (!effective)
        fail("/stability_params", "required for the roots command");
    const analysis::StabilityParams& params = *effective;

    const double eta = analysis::solve_eta(params);
    const double gamma = analysis::solve_gamma_star(params);

    json ladder = json::array();
    for (double d : blk.deltas) {
        const double c_star = analysis::solve_c_star(params, d);
        ladder.push_back({{"delta", d},
                          {"c_star", c_star},
                          {"log_c_star", std::log(c_star)},
                          {"gap_to_gamma_star", std::fabs(std::log(c_star) - gamma)}});
    }

    json summary = {
        {"command", "roots"},
        {"model", cfg.model_name},
        {"stability_params", stability_params_json(params)},
        {"eta", eta},
        {"gamma_star", gamma},
        {"c_star_ladder", ladder},
    };
    if (blk.report_l2l3_gamma)
        summary["gamma_star_l2l3"] =
            analysis::solve_gamma_star(params, analysis::GammaCoefficient::lambda23);
    io::write_file(cfg.output_dir + "/summary.json", summary.dump(2) + "\n");
    std::cout << "roots: eta " << io::format_double(eta) << ", gamma* "
              << io::format_double(gamma) << " -> " << cfg.output_dir << "\n";
    return 0;
}

int run_check(const ExperimentConfig& cfg) {
    const CheckBlock& blk = *cfg.check;
    const model::ModelConstants& constants = cfg.bundle.constants;
    const double p_bar = blk.p_bar.value_or(constants.p_bar);
    const double k2 = blk.k2.value_or(constants.k2);
    const double q_bar = blk.q_bar.value_or(constants.q_bar);
    const double k7 = blk.k7.value_or(constants.k7);

    std::vector<std::string> which = blk.checkers;
    if (which.empty()) {
        which = {"khasminskii", "monotonicity"};
        if (cfg.stability_params) which.push_back("stability-split");
    }

    json summary = {
        {"command", "check"},
        {"model", cfg.model_name},
        {"n_samples", blk.n_samples},
        {"box_radius", blk.box_radius},
        {"stream", blk.stream},
    };
    bool all_pass = true;
    for (const std::string& name : which) {
        analysis::CheckReport report;
        if (name == "khasminskii") {
            report = analysis::check_khasminskii(cfg.bundle.model, p_bar, k2, blk.n_samples,
                                                 blk.box_radius, blk.stream);
            summary["khasminskii"] = check_report_json(report);
            summary["khasminskii"]["p_bar"] = p_bar;
            summary["khasminskii"]["k2"] = k2;
        } else if (name == "monotonicity") {
            report = analysis::check_monotonicity(cfg.bundle.model, q_bar, k7, blk.n_samples,
                                                  blk.box_radius, blk.stream);
            summary["monotonicity"] = check_report_json(report);
            summary["monotonicity"]["q_bar"] = q_bar;
            summary["monotonicity"]["k7"] = k7;
        } else {
            if (!cfg.stability_params)
                fail("/stability_params", "required for the stability-split checker");
            report = analysis::check_stability_split(cfg.bundle.model, *cfg.stability_params,
                                                     blk.n_samples, blk.box_radius, blk.stream);
            summary["stability_split"] = check_report_json(report);
        }
        all_pass = all_pass && report.pass;
    }
    summary["all_pass"] = all_pass;
    io::write_file(cfg.output_dir + "/summary.json", summary.dump(2) + "\n");
    std::cout << "check: " << (all_pass ? "no violations found" : "violations found") << " -> "
              << cfg.output_dir << "\n";
    return 0;
}

struct CommonOpts {
    std::string config_path;
    std::string output_override;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    int workers_override = 0;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--output", opts.output_override, "output directory (overrides config)");
    cmd->add_option("--seed", opts.seed_override, "root seed (overrides config)")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--workers", opts.workers_override, "worker threads (overrides config)");
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Partially truncated Euler-Maruyama toolkit for hybrid delay SDEs"};
    app.require_subcommand(1);

    CommonOpts opts;
    const char* names[] = {"simulate", "converge", "stability", "roots", "check"};
    const char* descriptions[] = {
        "simulate sample paths and write paths.csv",
        "strong-error ladder against a fine reference; writes errors.csv",
        "Lyapunov-exponent study; writes stability.csv",
        "solve the stability rate equations; writes summary.json",
        "sampling-based assumption checkers; writes summary.json",
    };
    for (int i = 0; i < 5; ++i) attach_common(app.add_subcommand(names[i], descriptions[i]), opts);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const CLI::App* active = app.get_subcommands().front();
    const std::string command = active->get_name();

    try {
        ExperimentConfig cfg = load_config(opts.config_path);
        if (!opts.output_override.empty()) cfg.output_dir = opts.output_override;
        if (opts.seed_set) cfg.seed = opts.seed_override;
        if (opts.workers_override >= 1) cfg.workers = opts.workers_override;
        const int workers = resolve_workers(cfg.workers);

        const bool block_present = (command == "simulate" && cfg.simulate) ||
                                   (command == "converge" && cfg.converge) ||
                                   (command == "stability" && cfg.stability) ||
                                   (command == "roots" && cfg.roots) ||
                                   (command == "check" && cfg.check);
        if (!block_present)
            fail("/" + command, "config block required for the " + command + " command");

        prepare_output(cfg);
        write_manifest(cfg, command, workers);

        if (command == "simulate") return run_simulate(cfg, workers);
        if (command == "converge") return run_converge(cfg, workers);
        if (command == "stability") return run_stability(cfg, workers);
        if (command == "roots") return run_roots(cfg);
        return run_check(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const RejectedInputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NoPositiveRootError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const StepTooLargeError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const MarginViolatedError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace sdde::cli
