#include "metastack/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <thread>

#include "metastack/selection.hpp"

namespace metastack::pipeline {

std::string_view to_string(LstmVariant v) noexcept {
    switch (v) {
    case LstmVariant::V1: return "v1";
    case LstmVariant::V2: return "v2";
    case LstmVariant::V3: return "v3";
    }
    return "v?";
}

namespace {

std::string short_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string k_label(std::size_t k) { return k == kAllHistory ? "all" : std::to_string(k); }

// Ascending grid order with the N_t token last.
std::vector<std::size_t> ordered_neighbours(std::vector<std::size_t> k) {
    std::sort(k.begin(), k.end(), [](std::size_t a, std::size_t b) {
        if (a == kAllHistory) return false;
        if (b == kAllHistory) return true;
        return a < b;
    });
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

template <typename T>
std::vector<T> ordered(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

double metric_value(const metrics::MetricsReport& r, SelectionMetric metric) {
    switch (metric) {
    case SelectionMetric::Mape: return r.mape;
    case SelectionMetric::Mdape: return r.mdape;
    case SelectionMetric::Mse: return r.mse;
    }
    return r.mape;
}

} // namespace

std::string Cell::label() const {
    switch (learner) {
    case LearnerKind::Mean:
    case LearnerKind::Median: return "-";
    case LearnerKind::Linear:
    case LearnerKind::Forest: return mode == TrainingMode::Global ? "global" : "k=" + k_label(k);
    case LearnerKind::Knn: return "k=" + k_label(k) + ",b=" + short_number(b);
    case LearnerKind::Mlp:
        return (mode == TrainingMode::Global ? std::string("global") : "k=" + k_label(k)) +
               ",nodes=" + std::to_string(nodes);
    case LearnerKind::Lstm: {
        const LstmVariant v = mode == TrainingMode::RecentV1     ? LstmVariant::V1
                              : mode == TrainingMode::SeasonalV2 ? LstmVariant::V2
                                                                 : LstmVariant::V3;
        return std::string(to_string(v)) + ",c=" + std::to_string(c);
    }
    }
    return "?";
}

ExperimentConfig ExperimentConfig::desk() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::full() {
    ExperimentConfig c;
    c.test_point_count = 100;
    c.neighbours = {20, 40, 60, 80, 100, 120, 140, 160, 180, 200, 250, 300, kAllHistory};
    c.windows = {24, 48, 72, 168, 504};
    c.bandwidths = {0.03, 0.05, 0.07};
    c.mlp_nodes = {1, 3, 5};
    c.rf_trees = 100;
    c.lstm_hidden = 128;
    return c;
}

void ExperimentConfig::validate() const {
    auto check = [](bool ok, const std::string& what) { require(ok, ErrorKind::ConfigError, what); };
    check(horizon >= 1, "horizon must be >= 1");
    check(test_point_count >= 1, "test_point_count must be >= 1");
    check(!learners.empty(), "at least one learner is required");
    check(std::set<LearnerKind>(learners.begin(), learners.end()).size() == learners.size(),
          "learners must not repeat");
    check(!neighbours.empty(), "grid K must not be empty");
    check(!windows.empty(), "grid C must not be empty");
    check(!bandwidths.empty(), "grid b must not be empty");
    check(!mlp_nodes.empty(), "grid mlp_nodes must not be empty");
    check(!lstm_variants.empty(), "at least one LSTM variant is required");
    for (double b : bandwidths) check(b > 0.0 && std::isfinite(b), "bandwidths must be positive");
    for (std::size_t m : mlp_nodes) check(m >= 1, "mlp_nodes entries must be >= 1");
    for (std::size_t c : windows) check(c >= 1, "window lengths must be >= 1");
    check(mlp_epochs >= 1 && lstm_epochs >= 1, "epochs must be >= 1");
    check(mlp_alpha >= 0.0, "mlp alpha must be non-negative");
    check(rf_trees >= 1 && rf_min_leaf >= 1, "rf p and q must be >= 1");
    check(lstm_hidden >= 1, "lstm m must be >= 1");
    check(s1 >= 1 && s2 >= s1 && s2 % s1 == 0, "s2 must be a positive multiple of s1");
}

std::vector<Cell> ExperimentConfig::cells() const {
    const auto ks = ordered_neighbours(neighbours);
    const auto cs = ordered(windows);
    const auto bs = ordered(bandwidths);
    const auto nodes = ordered(mlp_nodes);
    auto mode_for = [](std::size_t k) { return k == kAllHistory ? TrainingMode::Global : TrainingMode::Local; };

    std::vector<Cell> out;
    for (LearnerKind learner : learners) {
        switch (learner) {
        case LearnerKind::Mean:
        case LearnerKind::Median: out.push_back({learner, TrainingMode::QueryOnly}); break;
        case LearnerKind::Linear:
        case LearnerKind::Forest:
            for (std::size_t k : ks) out.push_back({learner, mode_for(k), k});
            break;
        case LearnerKind::Knn:
            for (std::size_t k : ks)
                for (double b : bs) out.push_back({learner, TrainingMode::Global, k, b});
            break;
        case LearnerKind::Mlp:
            for (std::size_t k : ks)
                for (std::size_t m : nodes) out.push_back({learner, mode_for(k), k, 0.0, m});
            break;
        case LearnerKind::Lstm:
            for (LstmVariant v : lstm_variants) {
                const TrainingMode mode = v == LstmVariant::V1   ? TrainingMode::RecentV1
                                          : v == LstmVariant::V2 ? TrainingMode::SeasonalV2
                                                                 : TrainingMode::SeasonalV3;
                for (std::size_t c : cs) out.push_back({learner, mode, kAllHistory, 0.0, 0, c});
            }
            break;
        }
    }
    return out;
}

std::vector<TimeIndex> pick_test_points(TimeIndex start, TimeIndex end, std::size_t count) {
    require(count >= 1 && end >= start && end - start + 1 >= count, ErrorKind::RangeTooSmall,
            "cannot place " + std::to_string(count) + " test points in [" + std::to_string(start) + ", " +
                std::to_string(end) + "]");
    if (count == 1) return {start};
    std::vector<TimeIndex> out(count);
    const double span = static_cast<double>(end - start);
    for (std::size_t j = 0; j < count; ++j) {
        out[j] = start + static_cast<TimeIndex>(std::lround(static_cast<double>(j) * span / static_cast<double>(count - 1)));
    }
    return out;
}

std::vector<TimeIndex> test_points_for(std::size_t length, std::size_t count) {
    return pick_test_points(length / 2 + 1, length, count);
}

void AccessAudit::record(const TrainingAccess& access, std::size_t horizon) {
    std::uint64_t bad = 0;
    for (TimeIndex tau : access.indices) bad += (tau + horizon > access.t) ? 1 : 0;
    rows_ += access.indices.size();
    violations_ += bad;
    if (observer) {
        std::lock_guard lock(mutex_);
        observer(access);
    }
}

std::vector<std::pair<LearnerKind, std::size_t>> best_variant(std::span<const Cell> cells,
                                                               std::span<const metrics::MetricsReport> scores,
                                                               SelectionMetric metric) {
    require(cells.size() == scores.size(), ErrorKind::LengthMismatch, "one score per cell is required");
    std::vector<std::pair<LearnerKind, std::size_t>> out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == cells[i].learner; });
        if (it == out.end()) {
            out.emplace_back(cells[i].learner, i);
        } else if (metric_value(scores[i], metric) < metric_value(scores[it->second], metric)) {
            it->second = i;
        }
    }
    return out;
}

double forecast_cell(const AlignedPanel& data, const Cell& cell, TimeIndex t, const ExperimentConfig& config,
                     std::uint64_t seed, AccessAudit* audit, std::size_t series_index, std::size_t cell_index) {
    const auto query = data.pattern(t);
    if (cell.mode == TrainingMode::QueryOnly) {
        return cell.learner == LearnerKind::Median ? learners::combine_median(query) : learners::combine_mean(query);
    }

    const std::size_t h = config.horizon;
    std::vector<TimeIndex> xi;
    switch (cell.mode) {
    case TrainingMode::Global: xi = selection::select_global(t, h); break;
    case TrainingMode::Local: {
        const auto global = selection::select_global(t, h);
        const auto pool = TrainingSet::from_panel(data, global, t, h);
        xi = selection::select_knn_local(query, pool, cell.k);
        break;
    }
    // LSTM windows longer than the available history are shortened to it.
    case TrainingMode::RecentV1: {
        require(t > h + 1, ErrorKind::EmptyWindow, "no history before the query");
        xi = selection::select_recent_v1(t, h, std::min(cell.c, t - h - 1));
        break;
    }
    case TrainingMode::SeasonalV2:
    case TrainingMode::SeasonalV3: {
        const std::size_t s = cell.mode == TrainingMode::SeasonalV2 ? config.s1 : config.s2;
        const std::size_t available = (t - 1) / s;
        require(available >= 1, ErrorKind::EmptyWindow, "no phase-aligned history before the query");
        xi = selection::select_seasonal(t, s, std::min(cell.c, available));
        break;
    }
    case TrainingMode::QueryOnly: break;
    }

    if (audit != nullptr) audit->record({series_index, t, cell_index, xi}, h);
    const TrainingSet train = TrainingSet::from_panel(data, xi, t, h);

    learners::Hyperparameters hyper;
    hyper.knn = {cell.k == kAllHistory ? train.size() : cell.k, cell.b};
    hyper.mlp.hidden = cell.nodes == 0 ? 1 : cell.nodes;
    hyper.mlp.epochs = config.mlp_epochs;
    hyper.mlp.alpha = config.mlp_alpha;
    hyper.mlp.seed = seed;
    hyper.forest.trees = config.rf_trees;
    hyper.forest.min_leaf = config.rf_min_leaf;
    hyper.forest.features_per_split = config.rf_features;
    hyper.forest.seed = seed;
    hyper.lstm.hidden = config.lstm_hidden;
    hyper.lstm.epochs = config.lstm_epochs;
    hyper.lstm.seed = seed;

    const auto model = learners::fit_meta_model(cell.learner, train, hyper, t);
    // The LSTM warms its state on the same window it was trained on.
    return learners::predict(model, query, &train);
}

namespace {

struct Task {
    std::size_t series;
    std::size_t point;
    std::size_t cell;
};

void execute(std::vector<Task>& tasks, std::size_t jobs, const std::function<void(const Task&)>& work) {
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                work(tasks[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    // Report the earliest failing task so errors do not depend on scheduling.
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace

RunResult run_experiment(std::span<const SeriesInput> inputs, const ExperimentConfig& config,
                         const RunOptions& options) {
    config.validate();
    require(!inputs.empty(), ErrorKind::DataError, "no series to evaluate");

    RunResult res;
    res.cells = config.cells();
    const std::size_t n_series = inputs.size();
    const std::size_t n_cells = res.cells.size();

    for (const auto& in : inputs) {
        res.series.push_back(in.name);
        auto points = test_points_for(in.data.length(), config.test_point_count);
        require(points.front() > config.horizon, ErrorKind::DataError,
                "series '" + in.name + "' is too short for the requested test points");
        std::vector<double> targets, medians;
        std::vector<std::vector<double>> queries;
        std::vector<Timestamp> stamps;
        for (TimeIndex t : points) {
            stamps.push_back(in.data.series().timestamps()[t - 1]);
            const auto q = in.data.pattern(t);
            targets.push_back(in.data.target(t));
            queries.emplace_back(q.begin(), q.end());
            medians.push_back(learners::combine_median(q));
        }
        res.test_points.push_back(std::move(points));
        res.timestamps.push_back(std::move(stamps));
        res.targets.push_back(std::move(targets));
        res.queries.push_back(std::move(queries));
        res.median_reference.push_back(std::move(medians));
    }

    res.by_cell.assign(n_cells, std::vector<CellSeriesResult>(n_series));
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < n_series; ++s) {
        for (std::size_t c = 0; c < n_cells; ++c) res.by_cell[c][s].forecasts.resize(res.test_points[s].size());
        for (std::size_t p = 0; p < res.test_points[s].size(); ++p) {
            for (std::size_t c = 0; c < n_cells; ++c) tasks.push_back({s, p, c});
        }
    }

    execute(tasks, options.jobs, [&](const Task& task) {
        const TimeIndex t = res.test_points[task.series][task.point];
        const Cell& cell = res.cells[task.cell];
        try {
            res.by_cell[task.cell][task.series].forecasts[task.point] =
                forecast_cell(inputs[task.series].data, cell, t, config, config.seed ^ static_cast<std::uint64_t>(t),
                              options.audit, task.series, task.cell);
        } catch (const Error& e) {
            throw Error(e.kind(), "series '" + inputs[task.series].name + "', t=" + std::to_string(t) + ", " +
                                      std::string(learners::to_string(cell.learner)) + " [" + cell.label() +
                                      "]: " + e.what());
        }
    });

    // Aggregation runs single-threaded in fixed order.
    res.pooled.resize(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
        std::vector<double> all_targets, all_forecasts;
        for (std::size_t s = 0; s < n_series; ++s) {
            auto& r = res.by_cell[c][s];
            r.metrics = metrics::summarize(res.targets[s], r.forecasts);
            all_targets.insert(all_targets.end(), res.targets[s].begin(), res.targets[s].end());
            all_forecasts.insert(all_forecasts.end(), r.forecasts.begin(), r.forecasts.end());
        }
        res.pooled[c] = metrics::summarize(all_targets, all_forecasts);
    }

    const auto best = best_variant(res.cells, res.pooled, config.selection_metric);
    for (const auto& [learner, cell] : best) {
        res.learners.push_back(learner);
        std::vector<std::size_t> per_series(n_series, cell);
        if (config.selection == SelectionScope::PerSeries) {
            for (std::size_t s = 0; s < n_series; ++s) {
                double best_score = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < n_cells; ++c) {
                    if (res.cells[c].learner != learner) continue;
                    const double v = metric_value(res.by_cell[c][s].metrics, config.selection_metric);
                    if (v < best_score) {
                        best_score = v;
                        per_series[s] = c;
                    }
                }
            }
        }
        res.chosen.push_back(std::move(per_series));
    }

    const std::size_t n_learners = res.learners.size();
    res.per_series_mape.assign(n_series, std::vector<double>(n_learners));
    for (std::size_t l = 0; l < n_learners; ++l) {
        std::vector<double> all_targets, all_forecasts, all_medians;
        std::vector<std::vector<double>> all_queries;
        for (std::size_t s = 0; s < n_series; ++s) {
            const auto& r = res.by_cell[res.chosen[l][s]][s];
            res.per_series_mape[s][l] = r.metrics.mape;
            all_targets.insert(all_targets.end(), res.targets[s].begin(), res.targets[s].end());
            all_forecasts.insert(all_forecasts.end(), r.forecasts.begin(), r.forecasts.end());
            all_medians.insert(all_medians.end(), res.median_reference[s].begin(), res.median_reference[s].end());
            all_queries.insert(all_queries.end(), res.queries[s].begin(), res.queries[s].end());
        }
        res.learner_metrics.push_back(metrics::summarize(all_targets, all_forecasts));
        res.extrapolation.push_back(metrics::extrapolation_counts(all_forecasts, all_queries, all_targets, all_medians));
    }

    res.dm_wins.assign(n_learners, std::vector<std::size_t>(n_learners, 0));
    res.dm_available = n_learners >= 2 && config.test_point_count >= 10;
    if (res.dm_available) {
        for (std::size_t s = 0; s < n_series; ++s) {
            std::vector<std::vector<double>> errors(n_learners);
            for (std::size_t l = 0; l < n_learners; ++l) {
                const auto& f = res.by_cell[res.chosen[l][s]][s].forecasts;
                for (std::size_t p = 0; p < f.size(); ++p) errors[l].push_back(res.targets[s][p] - f[p]);
            }
            for (std::size_t a = 0; a < n_learners; ++a) {
                for (std::size_t b = 0; b < n_learners; ++b) {
                    if (a == b) continue;
                    const auto dm = metrics::dm_test(errors[a], errors[b], config.horizon);
                    if (dm.significant && dm.statistic < 0) ++res.dm_wins[a][b];
                }
            }
        }
    }

    if (n_learners >= 2) {
        std::vector<std::string> names;
        for (LearnerKind l : res.learners) names.emplace_back(learners::to_string(l));
        res.ranking = metrics::rank_models(res.per_series_mape, std::move(names));
    }
    return res;
}

} // namespace metastack::pipeline
