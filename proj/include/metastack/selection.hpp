#pragma once

#include <span>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::selection {

/// All history up to the last observed target: {1, ..., t-h}.
std::vector<TimeIndex> select_global(TimeIndex t, std::size_t h);

/// Positions (0-based, into `candidates`) of the k patterns nearest to `query`,
/// returned in ascending order. Distance ties go to the earlier time index.
std::vector<std::size_t> nearest_positions(std::span<const double> query, const TrainingSet& candidates,
                                           std::size_t k);

/// Time indices of the k candidates nearest to `query` (Euclidean), ascending.
std::vector<TimeIndex> select_knn_local(std::span<const double> query, const TrainingSet& candidates,
                                        std::size_t k);

/// Last c indices ending at t-h: {t-h-c+1, ..., t-h}.
std::vector<TimeIndex> select_recent_v1(TimeIndex t, std::size_t h, std::size_t c);

/// Phase-aligned lags {t-c*s, ..., t-s}. Used with s = s1 (v2) and s = s2 (v3).
std::vector<TimeIndex> select_seasonal(TimeIndex t, std::size_t s, std::size_t c);

/// Dispatches on spec.kind. `query`/`pool` are only consulted for KnnLocal.
std::vector<TimeIndex> select(const SelectorSpec& spec, TimeIndex t, std::span<const double> query = {},
                              const TrainingSet* pool = nullptr);

} // namespace metastack::selection
