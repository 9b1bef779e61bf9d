#include "metastack/learners/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace metastack::learners {

double knn_bandwidth(std::span<const double> distances, double b) {
    require(!distances.empty(), ErrorKind::EmptyTrainingSet, "bandwidth needs at least one distance");
    require(b > 0.0, ErrorKind::InvalidArgument, "bandwidth multiplier b must be positive");
    std::vector<double> d(distances.begin(), distances.end());
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
    double median = d[mid];
    if (d.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    if (median > 0.0) return b * median;
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    return b * (mean > 0.0 ? mean : 1.0);
}

KnnForecast knn_predict(const TrainingSet& train, std::span<const double> query, const KnnConfig& config) {
    require(!train.empty(), ErrorKind::EmptyTrainingSet, "kNN combiner needs at least one training pair");
    require(config.k >= 1, ErrorKind::InvalidArgument, "k must be >= 1");
    require(query.size() == train.width(), ErrorKind::LengthMismatch, "query width differs from training patterns");

    const std::size_t n = train.size();
    std::vector<std::pair<double, std::size_t>> sq(n);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = train.pattern(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double diff = query[j] - p[j];
            d2 += diff * diff;
        }
        sq[i] = {d2, i};
        dist[i] = std::sqrt(d2);
    }
    const double sigma = knn_bandwidth(dist, config.b);

    const std::size_t k = std::min(config.k, n);
    std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(k - 1), sq.end());
    std::sort(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(k));

    // Weights are taken relative to the closest neighbour; the common factor
    // cancels in the ratio and a narrow bandwidth can no longer underflow to 0/0.
    const double nearest = sq.front().first;
    const double inv_s2 = 1.0 / (sigma * sigma);
    double num = 0.0;
    double den = 0.0;
    KnnForecast out{0.0, sigma, {}};
    out.neighbours.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double w = std::exp(-(sq[i].first - nearest) * inv_s2);
        num += w * train.target(sq[i].second);
        den += w;
        out.neighbours.push_back(sq[i].second);
    }
    std::sort(out.neighbours.begin(), out.neighbours.end());
    out.forecast = num / den;
    return out;
}

} // namespace metastack::learners
