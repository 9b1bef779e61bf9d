#include "metastack/learners/standardizer.hpp"

#include <cmath>
#include <tuple>

namespace metastack::learners {

namespace {

// Population spread; zero spread falls back to a unit divisor.
std::pair<double, double> mean_and_scale(std::span<const double> values, std::size_t stride, std::size_t offset,
                                         std::size_t count) {
    double mean = 0.0;
    for (std::size_t i = 0; i < count; ++i) mean += values[i * stride + offset];
    mean /= static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = values[i * stride + offset] - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(count));
    return {mean, sd > 0.0 ? sd : 1.0};
}

} // namespace

Standardizer Standardizer::fit(const TrainingSet& train) {
    require(!train.empty(), ErrorKind::EmptyTrainingSet, "cannot standardize an empty training set");
    Standardizer s;
    const std::size_t n = train.width();
    s.input_mean.resize(n);
    s.input_scale.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::tie(s.input_mean[j], s.input_scale[j]) = mean_and_scale(train.patterns(), n, j, train.size());
    }
    std::tie(s.target_mean, s.target_scale) = mean_and_scale(train.targets(), 1, 0, train.size());
    return s;
}

void Standardizer::transform_input(std::span<const double> raw, std::span<double> out) const {
    if (input_mean.empty()) {
        for (std::size_t j = 0; j < raw.size(); ++j) out[j] = raw[j];
        return;
    }
    for (std::size_t j = 0; j < raw.size(); ++j) out[j] = (raw[j] - input_mean[j]) / input_scale[j];
}

} // namespace metastack::learners
