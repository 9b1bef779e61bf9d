#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metastack/core.hpp"
#include "metastack/learners/standardizer.hpp"

namespace metastack::learners {

struct LstmOptions {
    std::size_t hidden = 8;    ///< m, width of every gate
    std::size_t epochs = 200;  ///< full-sequence passes, one update each
    double step = 0.01;
    double clip_norm = 1.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
};

struct LstmState {
    std::vector<double> cell;
    std::vector<double> hidden;
};

/// Single LSTM layer (gates ordered input, forget, candidate, output) with an
/// affine read-out of the hidden state.
///
/// Flat parameter layout: input weights (4m x n, row-major), recurrent
/// weights (4m x m), gate biases (4m), head weights (m), head bias.
class LstmModel {
public:
    LstmModel() = default;
    LstmModel(std::size_t inputs, std::size_t hidden, std::vector<double> parameters, Standardizer scaling = {});

    static std::size_t parameter_count(std::size_t inputs, std::size_t hidden) {
        return 4 * hidden * (inputs + hidden + 1) + hidden + 1;
    }

    std::size_t inputs() const noexcept { return inputs_; }
    std::size_t hidden() const noexcept { return hidden_; }
    std::span<const double> parameters() const noexcept { return params_; }
    const Standardizer& scaling() const noexcept { return scaling_; }

    LstmState initial_state() const;

    /// Consumes one raw pattern, updates the state and returns the output in target units.
    double step(std::span<const double> pattern, LstmState& state) const;

    /// Outputs for every step of `sequence`, starting from a zero state.
    std::vector<double> run(const TrainingSet& sequence) const;

    /// Warms the state on `history` (in time order), then forecasts `query`.
    double predict(const TrainingSet& history, std::span<const double> query) const;

    double step_scaled(std::span<const double> x, LstmState& state) const;

private:
    std::size_t inputs_ = 0;
    std::size_t hidden_ = 0;
    std::vector<double> params_;
    Standardizer scaling_;
};

/// Fits on the training sequence (patterns in increasing time order).
LstmModel lstm_fit(const TrainingSet& train, const LstmOptions& options);

inline double lstm_predict(const LstmModel& model, const TrainingSet& history, std::span<const double> query) {
    return model.predict(history, query);
}

/// SSE of the per-step outputs of model.run(sequence) against its targets.
double lstm_sequence_sse(const LstmModel& model, const TrainingSet& sequence);

/// Gradient of lstm_sequence_sse by backpropagation through the whole sequence.
std::vector<double> lstm_sse_gradient(const LstmModel& model, const TrainingSet& sequence);

} // namespace metastack::learners
