#pragma once

#include <span>
#include <string>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::metrics {

struct MetricsReport {
    double mape = 0.0;
    double mdape = 0.0;
    double mse = 0.0;
    double mpe = 0.0;
    double stdpe = 0.0;
    std::size_t count = 0;
};

/// PE_t = 100 (y_t - yhat_t) / y_t, so over-forecasts are negative. Throws ZeroTarget.
std::vector<double> percentage_errors(std::span<const double> targets, std::span<const double> forecasts);

/// StdPE uses the count-1 divisor and is 0 for a single point.
MetricsReport summarize(std::span<const double> targets, std::span<const double> forecasts);

struct DmResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool significant = false;
};

/// Diebold-Mariano test on the squared-error differential e_a^2 - e_b^2.
/// A negative statistic means `errors_a` is the more accurate series.
/// The long-run variance uses autocovariances at lags 0..horizon-1 with unit weights.
DmResult dm_test(std::span<const double> errors_a, std::span<const double> errors_b, std::size_t horizon = 1,
                 double alpha = 0.05);

/// tallies[model][position] = number of series where the model took rank position+1.
struct RankTally {
    std::vector<std::string> models;
    std::vector<std::vector<std::size_t>> tallies;
};

/// Ranks models per series by ascending MAPE; ties share the lower rank (1, 1, 3).
/// `per_series_mape[s][m]` holds the MAPE of model m on series s.
RankTally rank_models(const std::vector<std::vector<double>>& per_series_mape, std::vector<std::string> models);

struct ExtrapolationCounts {
    std::size_t n1 = 0;  ///< forecasts outside the base-forecast interval
    std::size_t n2 = 0;  ///< ... whose target lies outside on the same side
    std::size_t n3 = 0;  ///< ... that beat the median combiner
};

/// `queries[i]` is the base-forecast vector of point i; `median_forecasts` the
/// median combiner's outputs at the same points.
ExtrapolationCounts extrapolation_counts(std::span<const double> meta_forecasts,
                                         const std::vector<std::vector<double>>& queries,
                                         std::span<const double> targets, std::span<const double> median_forecasts);

/// Two-sided standard-normal tail probability.
double normal_two_sided_p(double z);

} // namespace metastack::metrics
