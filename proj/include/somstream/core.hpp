#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace somstream {

/// Sorted, duplicate-free set of class indices.
struct LabelSet {
    std::vector<int> ids;

    void insert(int c) {
        auto it = std::lower_bound(ids.begin(), ids.end(), c);
        if (it == ids.end() || *it != c) ids.insert(it, c);
    }
    bool contains(int c) const {
        return std::binary_search(ids.begin(), ids.end(), c);
    }
    std::size_t size() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
    bool operator==(const LabelSet&) const = default;
};

/// One stream item. `truth` is only ever read by the evaluator; the online
/// classifier receives scaled feature vectors and never sees it.
struct Instance {
    std::vector<double> features;
    std::optional<LabelSet> truth;
    std::uint64_t sequence_id = 0;
};

struct DatasetMeta {
    int n_features = 0;
    int n_classes = 0;
    std::vector<double> feature_min;
    std::vector<double> feature_max;
};

/// Running mean of |Y_i| over n instances.
struct LabelCardinality {
    double z = 0.0;
    std::uint64_t n = 0;
};

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("euclidean_distance: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Similarity in (0,1]: exp(-||x - m||). Equals 1 iff x == m.
inline double discriminant(std::span<const double> x, std::span<const double> m) {
    return std::exp(-euclidean_distance(x, m));
}

inline LabelCardinality batch_label_cardinality(const std::vector<LabelSet>& labelsets) {
    if (labelsets.empty())
        throw std::invalid_argument("batch_label_cardinality: empty input");
    std::uint64_t total = 0;
    for (const auto& y : labelsets) total += y.size();
    return {static_cast<double>(total) / static_cast<double>(labelsets.size()),
            labelsets.size()};
}

/// Min-max scaling with the offline-fitted range; online values outside the
/// range clamp to [0,1]. A constant feature (min == max) maps to 0.5.
inline std::vector<double> scale_features(const std::vector<double>& x, const DatasetMeta& meta) {
    if (static_cast<int>(x.size()) != meta.n_features)
        throw std::invalid_argument("scale_features: length mismatch");
    std::vector<double> out(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) {
        double lo = meta.feature_min[f];
        double hi = meta.feature_max[f];
        if (lo == hi) {
            out[f] = 0.5;
        } else {
            out[f] = std::clamp((x[f] - lo) / (hi - lo), 0.0, 1.0);
        }
    }
    return out;
}

/// Deterministic RNG used everywhere reproducibility matters. Distributions
/// are hand-rolled so streams are stable across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // splitmix64 warmup so nearby seeds decorrelate
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::size_t index(std::size_t n) {
        std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace somstream
