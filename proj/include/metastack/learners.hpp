#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "metastack/core.hpp"
#include "metastack/learners/baseline.hpp"
#include "metastack/learners/forest.hpp"
#include "metastack/learners/knn.hpp"
#include "metastack/learners/linear.hpp"
#include "metastack/learners/lstm.hpp"
#include "metastack/learners/mlp.hpp"

namespace metastack::learners {

enum class LearnerKind { Mean, Median, Linear, Knn, Mlp, Forest, Lstm };

std::string_view to_string(LearnerKind kind) noexcept;
std::optional<LearnerKind> parse_learner(std::string_view name) noexcept;

/// Mean and Median use the query row only; every other learner is trained.
constexpr bool is_trained(LearnerKind kind) noexcept {
    return kind != LearnerKind::Mean && kind != LearnerKind::Median;
}

struct Hyperparameters {
    KnnConfig knn;
    MlpOptions mlp;
    ForestOptions forest;
    LstmOptions lstm;
};

/// kNN is lazy: fitting keeps the training set.
struct KnnMemory {
    TrainingSet train;
    KnnConfig config;
};

using ModelParams = std::variant<std::monostate, LinearCoeffs, KnnMemory, MlpModel, Forest, LstmModel>;

/// A fitted combiner for one query time. Immutable once built.
struct MetaModel {
    LearnerKind kind;
    TimeIndex fitted_at;
    ModelParams params;
};

MetaModel fit_meta_model(LearnerKind kind, const TrainingSet& train, const Hyperparameters& hyper,
                         TimeIndex fitted_at);

/// `history` is required for the LSTM (state warm-up) and ignored otherwise.
double predict(const MetaModel& model, std::span<const double> query, const TrainingSet* history = nullptr);

} // namespace metastack::learners
