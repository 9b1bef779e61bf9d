#include "metastack/learners.hpp"

#include <array>
#include <utility>

namespace metastack::learners {

namespace {

constexpr std::array<std::pair<LearnerKind, std::string_view>, 7> kNames{{
    {LearnerKind::Mean, "mean"},
    {LearnerKind::Median, "median"},
    {LearnerKind::Linear, "lr"},
    {LearnerKind::Knn, "knn"},
    {LearnerKind::Mlp, "mlp"},
    {LearnerKind::Forest, "rf"},
    {LearnerKind::Lstm, "lstm"},
}};

} // namespace

std::string_view to_string(LearnerKind kind) noexcept {
    for (const auto& [k, name] : kNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<LearnerKind> parse_learner(std::string_view name) noexcept {
    for (const auto& [k, n] : kNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

MetaModel fit_meta_model(LearnerKind kind, const TrainingSet& train, const Hyperparameters& hyper,
                         TimeIndex fitted_at) {
    MetaModel model{kind, fitted_at, std::monostate{}};
    switch (kind) {
    case LearnerKind::Mean:
    case LearnerKind::Median: break;
    case LearnerKind::Linear: model.params = fit_linear(train); break;
    case LearnerKind::Knn:
        require(!train.empty(), ErrorKind::EmptyTrainingSet, "kNN combiner needs at least one training pair");
        model.params = KnnMemory{train, hyper.knn};
        break;
    case LearnerKind::Mlp: model.params = mlp_fit(train, hyper.mlp); break;
    case LearnerKind::Forest: model.params = rf_fit(train, hyper.forest); break;
    case LearnerKind::Lstm: model.params = lstm_fit(train, hyper.lstm); break;
    }
    return model;
}

double predict(const MetaModel& model, std::span<const double> query, const TrainingSet* history) {
    switch (model.kind) {
    case LearnerKind::Mean: return combine_mean(query);
    case LearnerKind::Median: return combine_median(query);
    case LearnerKind::Linear: return std::get<LinearCoeffs>(model.params)(query);
    case LearnerKind::Knn: {
        const auto& mem = std::get<KnnMemory>(model.params);
        return knn_combine(mem.train, query, mem.config);
    }
    case LearnerKind::Mlp: return std::get<MlpModel>(model.params).predict(query);
    case LearnerKind::Forest: return std::get<Forest>(model.params).predict(query);
    case LearnerKind::Lstm: {
        require(history != nullptr, ErrorKind::InvalidArgument, "LSTM prediction needs a warm-up history");
        return std::get<LstmModel>(model.params).predict(*history, query);
    }
    }
    fail(ErrorKind::InvalidArgument, "unknown learner kind");
}

} // namespace metastack::learners
