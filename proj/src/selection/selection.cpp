#include "metastack/selection.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace metastack::selection {

std::vector<TimeIndex> select_global(TimeIndex t, std::size_t h) {
    require(t > h, ErrorKind::EmptyWindow, "global window {1..t-h} is empty");
    std::vector<TimeIndex> xi(t - h);
    std::iota(xi.begin(), xi.end(), TimeIndex{1});
    return xi;
}

std::vector<std::size_t> nearest_positions(std::span<const double> query, const TrainingSet& candidates,
                                           std::size_t k) {
    require(!candidates.empty(), ErrorKind::EmptyPool, "no candidates to select neighbours from");
    require(k >= 1, ErrorKind::InvalidArgument, "k must be >= 1");
    require(query.size() == candidates.width(), ErrorKind::LengthMismatch, "query width differs from candidates");
    const std::size_t n = candidates.size();
    if (k >= n) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    // Squared distance preserves the ordering and the ties of the Euclidean distance.
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = candidates.pattern(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double diff = p[j] - query[j];
            d2 += diff * diff;
        }
        dist[i] = {d2, i};
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<TimeIndex> select_knn_local(std::span<const double> query, const TrainingSet& candidates,
                                        std::size_t k) {
    const auto positions = nearest_positions(query, candidates, k);
    std::vector<TimeIndex> xi;
    xi.reserve(positions.size());
    for (std::size_t pos : positions) xi.push_back(candidates.indices()[pos]);
    return xi;
}

std::vector<TimeIndex> select_recent_v1(TimeIndex t, std::size_t h, std::size_t c) {
    require(c >= 1, ErrorKind::InvalidArgument, "window length c must be >= 1");
    require(t > h + c, ErrorKind::EmptyWindow,
            "recent window of " + std::to_string(c) + " points ending at t-h reaches before index 1");
    std::vector<TimeIndex> xi(c);
    std::iota(xi.begin(), xi.end(), t - h - c + 1);
    return xi;
}

std::vector<TimeIndex> select_seasonal(TimeIndex t, std::size_t s, std::size_t c) {
    require(s >= 1 && c >= 1, ErrorKind::InvalidArgument, "period and window length must be >= 1");
    require(t > c * s, ErrorKind::EmptyWindow,
            "seasonal window of " + std::to_string(c) + " lags of " + std::to_string(s) + " reaches before index 1");
    std::vector<TimeIndex> xi(c);
    for (std::size_t j = 0; j < c; ++j) xi[j] = t - (c - j) * s;
    return xi;
}

std::vector<TimeIndex> select(const SelectorSpec& spec, TimeIndex t, std::span<const double> query,
                              const TrainingSet* pool) {
    spec.validate();
    switch (spec.kind) {
    case SelectorKind::Global: return select_global(t, spec.h);
    case SelectorKind::KnnLocal:
        require(pool != nullptr, ErrorKind::EmptyPool, "knn_local selection needs a candidate pool");
        return select_knn_local(query, *pool, spec.k);
    case SelectorKind::RecentV1: return select_recent_v1(t, spec.h, spec.c);
    case SelectorKind::SeasonalV2: return select_seasonal(t, spec.s1, spec.c);
    case SelectorKind::SeasonalV3: return select_seasonal(t, spec.s2, spec.c);
    }
    fail(ErrorKind::InvalidArgument, "unknown selector kind");
}

} // namespace metastack::selection
