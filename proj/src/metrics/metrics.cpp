#include "metastack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace metastack::metrics {

namespace {

double median_of(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

} // namespace

std::vector<double> percentage_errors(std::span<const double> targets, std::span<const double> forecasts) {
    require(targets.size() == forecasts.size(), ErrorKind::LengthMismatch, "targets and forecasts differ in length");
    std::vector<double> pe(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        require(targets[i] != 0.0, ErrorKind::ZeroTarget, "zero target at position " + std::to_string(i));
        pe[i] = 100.0 * (targets[i] - forecasts[i]) / targets[i];
    }
    return pe;
}

MetricsReport summarize(std::span<const double> targets, std::span<const double> forecasts) {
    const auto pe = percentage_errors(targets, forecasts);
    require(!pe.empty(), ErrorKind::TooShort, "metrics need at least one point");
    const auto count = static_cast<double>(pe.size());

    MetricsReport r;
    r.count = pe.size();
    std::vector<double> ape(pe.size());
    double se = 0.0;
    for (std::size_t i = 0; i < pe.size(); ++i) {
        ape[i] = std::abs(pe[i]);
        r.mape += ape[i];
        r.mpe += pe[i];
        const double e = targets[i] - forecasts[i];
        se += e * e;
    }
    r.mape /= count;
    r.mpe /= count;
    r.mse = se / count;
    r.mdape = median_of(std::move(ape));
    if (pe.size() >= 2) {
        double ss = 0.0;
        for (double v : pe) ss += (v - r.mpe) * (v - r.mpe);
        r.stdpe = std::sqrt(ss / (count - 1.0));
    }
    return r;
}

double normal_two_sided_p(double z) {
    return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

DmResult dm_test(std::span<const double> errors_a, std::span<const double> errors_b, std::size_t horizon,
                 double alpha) {
    require(errors_a.size() == errors_b.size(), ErrorKind::LengthMismatch, "DM error series differ in length");
    require(errors_a.size() >= 10, ErrorKind::TooShort, "DM test needs at least 10 paired errors");
    require(horizon >= 1, ErrorKind::InvalidArgument, "DM horizon must be >= 1");

    const std::size_t n = errors_a.size();
    const auto nd = static_cast<double>(n);
    std::vector<double> d(n);
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        d[t] = errors_a[t] * errors_a[t] - errors_b[t] * errors_b[t];
        mean += d[t];
    }
    mean /= nd;

    double variance = 0.0;
    for (std::size_t lag = 0; lag < horizon && lag < n; ++lag) {
        double gamma = 0.0;
        for (std::size_t t = lag; t < n; ++t) gamma += (d[t] - mean) * (d[t - lag] - mean);
        gamma /= nd;
        variance += lag == 0 ? gamma : 2.0 * gamma;
    }

    DmResult out;
    if (mean == 0.0) return out;
    if (variance <= 0.0) {
        // Constant non-zero differential: infinitely strong evidence.
        out.statistic = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
    } else {
        out.statistic = mean / std::sqrt(variance / nd);
        out.p_value = normal_two_sided_p(out.statistic);
    }
    out.significant = out.p_value < alpha;
    return out;
}

RankTally rank_models(const std::vector<std::vector<double>>& per_series_mape, std::vector<std::string> models) {
    require(!per_series_mape.empty(), ErrorKind::InvalidArgument, "ranking needs at least one series");
    require(models.size() >= 2, ErrorKind::InvalidArgument, "ranking needs at least two models");
    const std::size_t m = models.size();
    RankTally out{std::move(models), std::vector<std::vector<std::size_t>>(m, std::vector<std::size_t>(m, 0))};
    for (const auto& row : per_series_mape) {
        require(row.size() == m, ErrorKind::LengthMismatch, "MAPE row width differs from model count");
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t better = 0;
            for (std::size_t j = 0; j < m; ++j) better += row[j] < row[i] ? 1 : 0;
            ++out.tallies[i][better];
        }
    }
    return out;
}

ExtrapolationCounts extrapolation_counts(std::span<const double> meta_forecasts,
                                         const std::vector<std::vector<double>>& queries,
                                         std::span<const double> targets, std::span<const double> median_forecasts) {
    const std::size_t n = meta_forecasts.size();
    require(queries.size() == n && targets.size() == n && median_forecasts.size() == n, ErrorKind::LengthMismatch,
            "extrapolation inputs differ in length");
    ExtrapolationCounts c;
    for (std::size_t i = 0; i < n; ++i) {
        const Interval z = z_interval(queries[i]);
        const double f = meta_forecasts[i];
        if (z.contains(f)) continue;
        ++c.n1;
        const double y = targets[i];
        if ((f > z.high && y > z.high) || (f < z.low && y < z.low)) ++c.n2;
        if (std::abs(f - y) < std::abs(median_forecasts[i] - y)) ++c.n3;
    }
    return c;
}

} // namespace metastack::metrics
