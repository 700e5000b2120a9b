#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace agrowx {

/// Per-feature z-score parameters, x' = (x - mean) / stddev.
struct NormalizationStats {
    std::vector<std::string> features;
    std::vector<double> mean;
    std::vector<double> stddev;

    [[nodiscard]] std::size_t size() const { return features.size(); }

    [[nodiscard]] std::size_t index_of(const std::string& feature) const {
        for (std::size_t i = 0; i < features.size(); ++i)
            if (features[i] == feature) return i;
        return features.size();
    }

    bool operator==(const NormalizationStats&) const = default;
};

}  // namespace agrowx
