#include "metastack/importance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace metastack::importance {

std::vector<int> equal_frequency_bins(std::span<const double> values, int bins) {
    require(bins >= 1, ErrorKind::InvalidArgument, "bin count must be >= 1");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto total = static_cast<double>(values.size());
    std::vector<int> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto less = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
        out[i] = std::min(bins - 1, static_cast<int>(std::floor(bins * less / total)));
    }
    return out;
}

double mutual_information(std::span<const int> a, std::span<const int> b) {
    require(a.size() == b.size() && !a.empty(), ErrorKind::LengthMismatch, "mutual information needs paired samples");
    std::map<std::pair<int, int>, std::size_t> joint;
    std::map<int, std::size_t> pa;
    std::map<int, std::size_t> pb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++joint[{a[i], b[i]}];
        ++pa[a[i]];
        ++pb[b[i]];
    }
    const auto n = static_cast<double>(a.size());
    double mi = 0.0;
    for (const auto& [key, count] : joint) {
        const double pxy = static_cast<double>(count) / n;
        const double px = static_cast<double>(pa[key.first]) / n;
        const double py = static_cast<double>(pb[key.second]) / n;
        mi += pxy * std::log(pxy / (px * py));
    }
    return std::max(mi, 0.0);
}

namespace {

bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

} // namespace

std::vector<FeatureScore> mrmr_scores(const ForecastPanel& panel, std::span<const double> targets, int bins) {
    const std::size_t n = panel.width();
    require(panel.rows() == targets.size(), ErrorKind::LengthMismatch, "panel and targets differ in length");
    require(panel.rows() >= 20, ErrorKind::TooShort, "MRMR needs at least 20 rows");
    require(n >= 2, ErrorKind::InvalidArgument, "MRMR needs at least two features");

    const auto names = panel.model_names();
    const auto y_bins = equal_frequency_bins(targets, bins);
    std::vector<std::vector<int>> x_bins(n);
    std::vector<double> relevance(n, 0.0);
    std::vector<std::size_t> candidates;
    std::vector<std::size_t> degenerate;
    for (std::size_t j = 0; j < n; ++j) {
        const auto col = panel.column(j);
        if (is_constant(col)) {
            degenerate.push_back(j);
            continue;
        }
        x_bins[j] = equal_frequency_bins(col, bins);
        relevance[j] = mutual_information(x_bins[j], y_bins);
        candidates.push_back(j);
    }

    // redundancy_sum[j] accumulates I(x_j; x_s) over the selected s.
    std::vector<double> redundancy_sum(n, 0.0);
    std::vector<FeatureScore> out;
    out.reserve(n);
    std::vector<std::size_t> selected;
    while (!candidates.empty()) {
        std::size_t best_pos = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t pos = 0; pos < candidates.size(); ++pos) {
            const std::size_t j = candidates[pos];
            const double score = selected.empty()
                                     ? relevance[j]
                                     : relevance[j] - redundancy_sum[j] / static_cast<double>(selected.size());
            const bool better = score > best_score ||
                                (score == best_score && names[j] < names[candidates[best_pos]]);
            if (better) {
                best_score = score;
                best_pos = pos;
            }
        }
        const std::size_t chosen = candidates[best_pos];
        out.push_back({names[chosen], best_score});
        selected.push_back(chosen);
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best_pos));
        for (std::size_t j : candidates) redundancy_sum[j] += mutual_information(x_bins[j], x_bins[chosen]);
    }

    std::sort(degenerate.begin(), degenerate.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
    for (std::size_t j : degenerate) out.push_back({names[j], 0.0});
    return out;
}

std::vector<FeatureScore> rrelieff_scores(const ForecastPanel& panel, std::span<const double> targets, std::size_t k,
                                          std::size_t samples) {
    const std::size_t rows = panel.rows();
    const std::size_t n = panel.width();
    require(rows == targets.size(), ErrorKind::LengthMismatch, "panel and targets differ in length");
    require(k >= 1 && rows > k, ErrorKind::TooShort, "RReliefF needs more rows than neighbours");
    const std::size_t m = samples == 0 ? rows : std::min(samples, rows);

    // Range-normalized features; zero-range columns stay at 0 and never differ.
    std::vector<double> x(rows * n, 0.0);
    std::vector<bool> degenerate(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        const auto col = panel.column(j);
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        const double range = *hi - *lo;
        degenerate[j] = !(range > 0.0);
        if (degenerate[j]) continue;
        for (std::size_t r = 0; r < rows; ++r) x[r * n + j] = (col[r] - *lo) / range;
    }
    const auto [ylo, yhi] = std::minmax_element(targets.begin(), targets.end());
    const double y_range = *yhi - *ylo;

    const double weight = 1.0 / static_cast<double>(k);
    double n_dc = 0.0;
    std::vector<double> n_da(n, 0.0);
    std::vector<double> n_dc_da(n, 0.0);
    std::vector<std::pair<double, std::size_t>> dist(rows - 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double* xi = &x[i * n];
        std::size_t slot = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == i) continue;
            const double* xr = &x[r * n];
            double d2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = xi[j] - xr[j];
                d2 += d * d;
            }
            dist[slot++] = {d2, r};
        }
        std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
        std::sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k));
        for (std::size_t q = 0; q < k; ++q) {
            const std::size_t r = dist[q].second;
            const double dy = y_range > 0.0 ? std::abs(targets[i] - targets[r]) / y_range : 0.0;
            n_dc += dy * weight;
            for (std::size_t j = 0; j < n; ++j) {
                const double da = std::abs(x[i * n + j] - x[r * n + j]) * weight;
                n_da[j] += da;
                n_dc_da[j] += dy * da;
            }
        }
    }

    const auto md = static_cast<double>(m);
    std::vector<FeatureScore> out;
    out.reserve(n);
    const auto names = panel.model_names();
    for (std::size_t j = 0; j < n; ++j) {
        double w = 0.0;
        if (!degenerate[j]) {
            if (n_dc > 0.0) w += n_dc_da[j] / n_dc;
            if (md - n_dc > 0.0) w -= (n_da[j] - n_dc_da[j]) / (md - n_dc);
        }
        out.push_back({names[j], w});
    }
    return out;
}

} // namespace metastack::importance
