#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "somstream/eval.hpp"
#include "somstream/model.hpp"
#include "somstream/online.hpp"
#include "somstream/streams.hpp"

namespace somstream::cli {

/// One experiment cell. Every field can come from a key-value config file;
/// command-line flags override file keys.
struct RunConfig {
    std::string dataset;           // stream file with truth columns
    std::string generator_config;  // generator config (pipeline only)
    int grid_dim = 3;
    double eta = 0.05;
    std::uint64_t seed = 0;
    int n_windows = 50;
    double offline_fraction = 0.10;
    SplitMode split_mode = SplitMode::Head;
    AvgOutputMode avg_mode = AvgOutputMode::Cumulative;
    bool scale_inputs = true;
    std::string variant = "adaptive";  // adaptive | frozen
    std::string output_dir = "out";
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Prediction log: one row per instance, "sequence_id<TAB>comma-joined labels".
void write_predictions(const std::vector<std::pair<std::uint64_t, LabelSet>>& log,
                       const std::filesystem::path& path);
std::vector<std::pair<std::uint64_t, LabelSet>> load_predictions(
    const std::filesystem::path& path);

// Commands. Each throws on failure after removing partial outputs.
std::filesystem::path cmd_generate(const std::filesystem::path& config_path,
                                   const std::filesystem::path& out_path);
std::filesystem::path cmd_train(const std::filesystem::path& stream_path,
                                const RunConfig& cfg);
std::filesystem::path cmd_run(const std::filesystem::path& model_path,
                              const std::filesystem::path& stream_path,
                              const RunConfig& cfg);
void cmd_evaluate(const std::filesystem::path& log_path,
                  const std::filesystem::path& stream_path, const RunConfig& cfg);
void cmd_pipeline(const RunConfig& cfg);

}  // namespace somstream::cli
