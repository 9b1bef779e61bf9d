#pragma once

#include <span>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::learners {

/// Intercept plus one slope per base model.
struct LinearCoeffs {
    double intercept = 0.0;
    std::vector<double> slopes;

    double operator()(std::span<const double> query) const;
};

/// Minimum-norm least-squares fit of targets on [1 | patterns]. Collinear
/// base forecasts are handled by the rank-revealing solve.
LinearCoeffs fit_linear(const TrainingSet& train);

struct LinearForecast {
    double forecast;
    LinearCoeffs coeffs;
};

LinearForecast lr_combine(const TrainingSet& train, std::span<const double> query);

} // namespace metastack::learners
