#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metastack/core.hpp"
#include "metastack/learners/standardizer.hpp"

namespace metastack::learners {

struct MlpOptions {
    std::size_t hidden = 1;
    std::size_t epochs = 100;      ///< Levenberg-Marquardt iterations
    double alpha = 0.01;           ///< weight penalty in SSE + alpha * |w|^2
    double initial_damping = 1e-3;
    double gradient_tolerance = 1e-8;
    std::uint64_t seed = 0;
};

/// One hidden layer of bipolar-sigmoid units (2/(1+e^-z) - 1, i.e. tanh(z/2))
/// feeding a linear output node.
///
/// Parameters are kept in a flat vector: for each hidden node j the bias w0_j
/// followed by its n input weights, then the output weights v_1..v_m, then v0.
class MlpModel {
public:
    MlpModel() = default;
    MlpModel(std::size_t inputs, std::size_t hidden, std::vector<double> parameters,
             Standardizer scaling = {});

    std::size_t inputs() const noexcept { return inputs_; }
    std::size_t hidden() const noexcept { return hidden_; }
    std::span<const double> parameters() const noexcept { return params_; }
    const Standardizer& scaling() const noexcept { return scaling_; }

    static std::size_t parameter_count(std::size_t inputs, std::size_t hidden) {
        return hidden * (inputs + 1) + hidden + 1;
    }

    /// Output in target units.
    double predict(std::span<const double> query) const;

    /// Network output on already-scaled input; fills d(output)/d(param) when given.
    double evaluate_scaled(std::span<const double> x, std::span<double> jacobian_row = {}) const;

private:
    std::size_t inputs_ = 0;
    std::size_t hidden_ = 0;
    std::vector<double> params_;
    Standardizer scaling_;
};

MlpModel mlp_fit(const TrainingSet& train, const MlpOptions& options);

inline double mlp_predict(const MlpModel& model, std::span<const double> query) { return model.predict(query); }

/// Sum of squared errors of model.predict over the set.
double mlp_sse(const MlpModel& model, const TrainingSet& train);

/// Analytic gradient of mlp_sse with respect to the flat parameter vector.
std::vector<double> mlp_sse_gradient(const MlpModel& model, const TrainingSet& train);

} // namespace metastack::learners
