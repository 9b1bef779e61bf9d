#pragma once

#include <span>

namespace metastack::learners {

/// Arithmetic mean of the base forecasts. Throws EmptyQuery.
double combine_mean(std::span<const double> query);

/// Sample median; even counts average the two central order statistics.
double combine_median(std::span<const double> query);

} // namespace metastack::learners
