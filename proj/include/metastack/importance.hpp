#pragma once

#include <span>
#include <string>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::importance {

struct FeatureScore {
    std::string model;
    double score;
};

/// Equal-frequency bin of every value: min(bins-1, floor(bins * #{v' < v} / T)).
/// Tied values share a bin, so a constant column collapses into bin 0.
std::vector<int> equal_frequency_bins(std::span<const double> values, int bins);

/// Plug-in mutual information (nats) of two discretized variables.
double mutual_information(std::span<const int> a, std::span<const int> b);

/// Greedy MRMR with the difference (MID) criterion: relevance I(x; y) minus the
/// mean I(x; x_s) over already selected features. Returned in selection order
/// with each feature's score at its selection step; constant columns come last
/// with score 0. Ties go to the lexicographically smaller model name.
std::vector<FeatureScore> mrmr_scores(const ForecastPanel& panel, std::span<const double> targets, int bins = 10);

/// RReliefF weights on range-normalized features with k uniformly weighted
/// neighbours, sampling the first `samples` instances (0 = all). Returned in
/// panel column order; zero-range columns get weight 0.
std::vector<FeatureScore> rrelieff_scores(const ForecastPanel& panel, std::span<const double> targets,
                                          std::size_t k = 10, std::size_t samples = 0);

} // namespace metastack::importance
