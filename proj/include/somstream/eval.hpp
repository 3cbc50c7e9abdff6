#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "somstream/model.hpp"
#include "somstream/online.hpp"

namespace somstream {

enum class UndefinedF { Zero, Exclude };

struct WindowReport {
    int window_index = 0;
    std::uint64_t n_instances = 0;
    std::vector<std::uint64_t> tp, fp, fn;
    std::vector<double> per_label_f;
    double macro_f = 0.0;
};

struct RunReport {
    std::vector<WindowReport> windows;
    double mean_macro_f = 0.0;
    // run metadata
    int grid_dim = 0;
    double eta = 0.0;
    std::uint64_t seed = 0;
    std::string dataset_id;
    std::string variant;  // "adaptive" | "frozen"
    int n_windows = 0;
    int n_classes = 0;
};

/// Per-label F1 averaged uniformly over all labels; a label with no TP, FP,
/// or FN scores 0 by default (Exclude drops it from the mean instead).
double macro_f(const std::vector<LabelSet>& predictions,
               const std::vector<LabelSet>& truths, int n_classes,
               UndefinedF undefined = UndefinedF::Zero);

/// W contiguous windows of near-equal size; the first (len mod W) windows are
/// one instance larger.
RunReport windowed_evaluate(const std::vector<LabelSet>& predictions,
                            const std::vector<LabelSet>& truths, int n_classes,
                            int n_windows, UndefinedF undefined = UndefinedF::Zero);

/// Same pipeline as process_stream with adaptation disabled; the model is
/// untouched.
std::vector<std::pair<std::uint64_t, LabelSet>> run_frozen_baseline(
    const Model& model, const std::vector<Instance>& stream, double eta = 0.05);

/// Writes <base>_windows.csv (per-window table) and <base>_summary.txt
/// (versioned key-value run summary). Deterministic byte-for-byte.
void emit_report(const RunReport& report, const std::filesystem::path& base);

/// Round-trip reader for emit_report output (tables only carry what the
/// report schema defines; confusion counts are reloaded from the csv).
RunReport parse_report(const std::filesystem::path& base);

}  // namespace somstream
