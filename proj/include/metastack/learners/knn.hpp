#pragma once

#include <span>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::learners {

struct KnnConfig {
    std::size_t k = 40;
    double b = 0.05;  ///< bandwidth multiplier on the median query distance
};

struct KnnForecast {
    double forecast;
    double sigma;                          ///< effective Gaussian bandwidth
    std::vector<std::size_t> neighbours;   ///< positions in the training set, ascending
};

/// Bandwidth b * median(d) over all query-to-training distances. A zero median
/// falls back to b * mean(d), and to b when every distance is zero.
double knn_bandwidth(std::span<const double> distances, double b);

/// Gaussian-weighted average of the targets of the k nearest training patterns.
KnnForecast knn_predict(const TrainingSet& train, std::span<const double> query, const KnnConfig& config);

inline double knn_combine(const TrainingSet& train, std::span<const double> query, const KnnConfig& config) {
    return knn_predict(train, query, config).forecast;
}

} // namespace metastack::learners
