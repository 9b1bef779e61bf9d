#pragma once

#include <span>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::learners {

/// Per-column affine scaling fitted on one training set. Default-constructed
/// instances are the identity for any width.
struct Standardizer {
    std::vector<double> input_mean;
    std::vector<double> input_scale;
    double target_mean = 0.0;
    double target_scale = 1.0;

    static Standardizer fit(const TrainingSet& train);

    void transform_input(std::span<const double> raw, std::span<double> out) const;
    double transform_target(double y) const noexcept { return (y - target_mean) / target_scale; }
    double restore_target(double z) const noexcept { return z * target_scale + target_mean; }
};

} // namespace metastack::learners
