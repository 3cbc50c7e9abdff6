#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "somstream/core.hpp"

namespace somstream {

enum class DriftKind { None, Displacement, Rotation };

DriftKind drift_kind_from_string(const std::string& s);
std::string to_string(DriftKind kind);

/// MOA-style spherical clusters: one ball per class, uniform sampling inside
/// a uniformly chosen ball, labels = every ball containing the point. Every
/// sd instances the centers drift (per-cluster displacement direction, or a
/// joint rotation in the first two feature dimensions).
struct SphericalStreamConfig {
    int n_classes = 2;
    int n_features = 2;
    std::vector<std::vector<double>> centers;
    std::vector<double> radii;
    std::uint64_t stream_length = 10000;
    std::uint64_t sd = 1000;
    DriftKind drift_kind = DriftKind::None;
    double drift_step = 0.0;
    std::uint64_t rng_seed = 0;
};

std::vector<Instance> generate_spherical(const SphericalStreamConfig& cfg);

/// Key-value generator config file mirroring SphericalStreamConfig.
SphericalStreamConfig load_generator_config(const std::filesystem::path& path);
void save_generator_config(const SphericalStreamConfig& cfg,
                           const std::filesystem::path& path);

/// Stream file: comma-delimited, header f0..f{m-1},y0..y{n-1}, label columns
/// are 0/1 indicators.
void write_stream(const std::vector<Instance>& instances, int n_features, int n_classes,
                  const std::filesystem::path& path);

struct LoadedStream {
    DatasetMeta meta;  // feature_min/max left empty; fitted later by training
    std::vector<Instance> instances;
    std::vector<std::uint64_t> label_frequency;
};

LoadedStream load_delimited(const std::filesystem::path& path);

enum class SplitMode { Head, Stratified };

struct SplitResult {
    std::vector<Instance> train;
    std::vector<Instance> stream;
    std::vector<int> missing_classes;  // absent from the training portion
};

/// Head mode takes the first floor(fraction*len) rows; stratified mode picks
/// ~equal per-class counts. The remainder keeps its original order.
SplitResult split_offline(const std::vector<Instance>& instances, double fraction,
                          SplitMode mode, int n_classes);

}  // namespace somstream
