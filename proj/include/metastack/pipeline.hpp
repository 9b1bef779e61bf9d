#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "metastack/core.hpp"
#include "metastack/learners.hpp"
#include "metastack/metrics.hpp"

namespace metastack::pipeline {

using learners::LearnerKind;

/// Grid token standing for "all N_t available history points".
inline constexpr std::size_t kAllHistory = 0;

enum class TrainingMode { QueryOnly, Global, Local, RecentV1, SeasonalV2, SeasonalV3 };
enum class LstmVariant { V1, V2, V3 };
enum class SelectionScope { Global, PerSeries };
enum class SelectionMetric { Mape, Mdape, Mse };

std::string_view to_string(LstmVariant v) noexcept;

/// One point of a learner's hyperparameter grid.
struct Cell {
    LearnerKind learner = LearnerKind::Mean;
    TrainingMode mode = TrainingMode::QueryOnly;
    std::size_t k = kAllHistory;  ///< local training-set size, or the kNN neighbour count
    double b = 0.0;               ///< kNN bandwidth multiplier
    std::size_t nodes = 0;        ///< MLP hidden nodes
    std::size_t c = 0;            ///< LSTM window length

    std::string label() const;
};

struct ExperimentConfig {
    std::size_t horizon = 1;
    std::size_t test_point_count = 50;
    std::uint64_t seed = 1;
    std::vector<LearnerKind> learners{LearnerKind::Mean, LearnerKind::Median, LearnerKind::Linear, LearnerKind::Knn,
                                      LearnerKind::Mlp,  LearnerKind::Forest, LearnerKind::Lstm};

    std::vector<std::size_t> neighbours{40, kAllHistory};  ///< K, kAllHistory standing for N_t
    std::vector<std::size_t> windows{24, 168};              ///< C
    std::vector<double> bandwidths{0.05};                   ///< b
    std::vector<std::size_t> mlp_nodes{1};

    std::size_t mlp_epochs = 100;
    double mlp_alpha = 0.01;

    std::size_t rf_trees = 50;
    std::size_t rf_min_leaf = 1;
    std::size_t rf_features = 0;  ///< 0 = max(1, round(n/3))

    std::size_t lstm_hidden = 8;
    std::size_t lstm_epochs = 200;
    std::vector<LstmVariant> lstm_variants{LstmVariant::V1, LstmVariant::V2, LstmVariant::V3};
    std::size_t s1 = 24;
    std::size_t s2 = 168;

    SelectionScope selection = SelectionScope::Global;
    SelectionMetric selection_metric = SelectionMetric::Mape;

    /// 26-week synthetic scale: reduced grids, 50 test points, m = 8, p = 50.
    static ExperimentConfig desk();
    /// Full grids and model sizes: K = {20..200, 250, 300, N_t}, C = {24, 48, 72, 168, 504},
    /// b in {0.03, 0.05, 0.07}, nodes in {1, 3, 5}, p = 100, m = 128, 100 test points.
    static ExperimentConfig full();

    void validate() const;

    /// Every grid cell, grouped by learner in `learners` order; within a
    /// learner, cells ascend in their grid values with N_t last.
    std::vector<Cell> cells() const;
};

/// `count` indices evenly spread over [start, end]. Throws RangeTooSmall.
std::vector<TimeIndex> pick_test_points(TimeIndex start, TimeIndex end, std::size_t count);

/// Test points over the second half of a series of `length` rows.
std::vector<TimeIndex> test_points_for(std::size_t length, std::size_t count);

struct SeriesInput {
    std::string name;
    AlignedPanel data;
};

struct TrainingAccess {
    std::size_t series;
    TimeIndex t;
    std::size_t cell;
    std::span<const TimeIndex> indices;
};

/// Instrumentation: counts every training row handed to a learner and the
/// ones that would leak (index > t - h). The observer, when set, is called
/// under a lock.
class AccessAudit {
public:
    std::function<void(const TrainingAccess&)> observer;

    void record(const TrainingAccess& access, std::size_t horizon);
    std::uint64_t rows() const noexcept { return rows_.load(); }
    std::uint64_t violations() const noexcept { return violations_.load(); }

private:
    std::atomic<std::uint64_t> rows_{0};
    std::atomic<std::uint64_t> violations_{0};
    std::mutex mutex_;
};

struct RunOptions {
    std::size_t jobs = 1;
    AccessAudit* audit = nullptr;
};

struct CellSeriesResult {
    std::vector<double> forecasts;  ///< one per test point
    metrics::MetricsReport metrics;
};

struct RunResult {
    std::vector<std::string> series;
    std::vector<std::vector<TimeIndex>> test_points;            ///< [series][point]
    std::vector<std::vector<Timestamp>> timestamps;             ///< [series][point]
    std::vector<std::vector<double>> targets;                   ///< [series][point]
    std::vector<std::vector<std::vector<double>>> queries;      ///< [series][point][model]
    std::vector<std::vector<double>> median_reference;          ///< [series][point]

    std::vector<Cell> cells;
    std::vector<std::vector<CellSeriesResult>> by_cell;         ///< [cell][series]
    std::vector<metrics::MetricsReport> pooled;                 ///< [cell], over all series

    // Analysis over each learner's chosen cell.
    std::vector<LearnerKind> learners;
    std::vector<std::vector<std::size_t>> chosen;               ///< [learner][series] -> cell
    std::vector<metrics::MetricsReport> learner_metrics;        ///< [learner], pooled
    std::vector<std::vector<double>> per_series_mape;           ///< [series][learner]
    bool dm_available = false;
    std::vector<std::vector<std::size_t>> dm_wins;              ///< [a][b]: series where a beats b
    metrics::RankTally ranking;
    std::vector<metrics::ExtrapolationCounts> extrapolation;    ///< [learner]
};

/// Per learner, the cell minimising `metric` over `scores` ([cell]); ties keep
/// the earlier (smaller-grid) cell. Returned in the order learners first appear.
std::vector<std::pair<LearnerKind, std::size_t>> best_variant(std::span<const Cell> cells,
                                                               std::span<const metrics::MetricsReport> scores,
                                                               SelectionMetric metric = SelectionMetric::Mape);

/// Forecasts of one cell at test time t of one series.
double forecast_cell(const AlignedPanel& data, const Cell& cell, TimeIndex t, const ExperimentConfig& config,
                     std::uint64_t seed, AccessAudit* audit = nullptr, std::size_t series_index = 0,
                     std::size_t cell_index = 0);

RunResult run_experiment(std::span<const SeriesInput> inputs, const ExperimentConfig& config,
                         const RunOptions& options = {});

} // namespace metastack::pipeline
