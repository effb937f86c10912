#ifndef SDDE_CLI_HPP
#define SDDE_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdde/analysis.hpp"
#include "sdde/model.hpp"

namespace sdde::cli {

struct SimulateBlock {
    double delta = 0.0;
    double horizon = 0.0;
    long n_paths = 1;
};

struct ConvergeBlock {
    std::vector<double> deltas;
    double ref_delta = 0.0;
    double horizon = 0.0;
    long n_paths = 2;
    double p = 4.0; // moment exponent used by the reported step-size condition
};

struct StabilityBlock {
    double delta = 0.0;
    double horizon = 0.0;
    long n_paths = 1;
    double burn_in_fraction = 0.0;
    std::optional<analysis::StabilityParams> params; // block-level override
};

struct RootsBlock {
    std::vector<double> deltas;        // for the discrete-rate ladder
    bool report_l2l3_gamma = false;    // also report the (l2 + l3) variant
    std::optional<analysis::StabilityParams> params; // block-level override
};

struct CheckBlock {
    std::vector<std::string> checkers; // subset of khasminskii/monotonicity/stability-split
    long n_samples = 10000;
    double box_radius = 1000.0;
    std::uint64_t stream = 0;
    // Constants default from the model's recorded ones.
    std::optional<double> p_bar, k2, q_bar, k7;
};

struct ExperimentConfig {
    std::string model_name;
    model::BuiltinModel bundle;
    std::optional<analysis::StabilityParams> stability_params;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    int workers = 0; // 0 = auto
    std::optional<SimulateBlock> simulate;
    std::optional<ConvergeBlock> converge;
    std::optional<StabilityBlock> stability;
    std::optional<RootsBlock> roots;
    std::optional<CheckBlock> check;
    std::string resolved_json; // full resolved config, echoed into the manifest
};

// Parses and validates a config file. Throws ConfigError with a JSON-pointer
// style path naming the offending field.
ExperimentConfig load_config(const std::string& path);

// Entry point used by the binary: args excludes the program name.
// Returns 0 on success, 1 on study-invalid/model-violation, 2 on config errors.
int run(const std::vector<std::string>& args);

} // namespace sdde::cli

#endif // SDDE_CLI_HPP
