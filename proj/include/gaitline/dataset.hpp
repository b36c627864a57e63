#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gaitline/common.hpp"

namespace gaitline::classify {

/// Rows-by-features matrix with integer class ids in [0, n_classes).
struct Dataset {
    Matrix X;
    std::vector<int> y;
    int n_classes = 0;

    std::size_t rows() const { return X.size(); }
    std::size_t dim() const { return X.empty() ? 0 : X[0].size(); }

    void validate() const {
        if (X.size() != y.size()) {
            throw DataError("dataset: " + std::to_string(X.size()) + " rows vs " +
                            std::to_string(y.size()) + " labels");
        }
        for (const auto& r : X) {
            if (r.size() != dim()) throw DataError("dataset: ragged feature matrix");
        }
        for (int c : y) {
            if (c < 0 || c >= n_classes) {
                throw DataError("dataset: class id " + std::to_string(c) + " outside [0, " +
                                std::to_string(n_classes) + ")");
            }
        }
    }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
        for (int c : y) counts[static_cast<std::size_t>(c)]++;
        return counts;
    }
};

}  // namespace gaitline::classify
