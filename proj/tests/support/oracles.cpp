#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include <Eigen/SVD>

namespace metastack::testing {

namespace {

Rows design(const Rows& rows) {
    Rows x;
    for (const auto& r : rows) {
        std::vector<double> row{1.0};
        row.insert(row.end(), r.begin(), r.end());
        x.push_back(std::move(row));
    }
    return x;
}

} // namespace

std::vector<double> normal_equations_beta(const Rows& rows, std::span<const double> y) {
    const Rows x = design(rows);
    const std::size_t p = x.front().size();
    // Augmented [X'X | X'y].
    Rows a(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = 0; c < p; ++c) a[r][c] += x[i][r] * x[i][c];
            a[r][p] += x[i][r] * y[i];
        }
    }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= p; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> beta(p);
    for (std::size_t r = 0; r < p; ++r) beta[r] = a[r][p] / a[r][r];
    return beta;
}

std::vector<double> pseudo_inverse_beta(const Rows& rows, std::span<const double> y) {
    const Rows x = design(rows);
    const auto n = static_cast<Eigen::Index>(x.size());
    const auto p = static_cast<Eigen::Index>(x.front().size());
    Eigen::MatrixXd m(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) m(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double tol = 1e-10 * s(0);
    Eigen::VectorXd uty = svd.matrixU().transpose() * Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    for (Eigen::Index i = 0; i < s.size(); ++i) uty(i) = s(i) > tol ? uty(i) / s(i) : 0.0;
    const Eigen::VectorXd beta = svd.matrixV() * uty;
    return {beta.data(), beta.data() + beta.size()};
}

double linear_forecast(std::span<const double> beta, std::span<const double> query) {
    double f = beta[0];
    for (std::size_t j = 0; j < query.size(); ++j) f += beta[j + 1] * query[j];
    return f;
}

double knn_brute_force(const Rows& rows, std::span<const double> y, std::span<const double> query, std::size_t k,
                       double b) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < query.size(); ++j) s += (rows[i][j] - query[j]) * (rows[i][j] - query[j]);
        d.emplace_back(std::sqrt(s), i);
    }
    std::vector<double> all;
    for (const auto& e : d) all.push_back(e.first);
    std::sort(all.begin(), all.end());
    const std::size_t n = all.size();
    const double median = n % 2 == 1 ? all[n / 2] : 0.5 * (all[n / 2 - 1] + all[n / 2]);
    const double sigma = b * median;
    std::sort(d.begin(), d.end());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t q = 0; q < std::min(k, n); ++q) {
        const double w = std::exp(-(d[q].first * d[q].first) / (sigma * sigma));
        num += w * y[d[q].second];
        den += w;
    }
    return num / den;
}

CutOracle exhaustive_cut(std::span<const double> x, std::span<const double> y, std::size_t min_leaf) {
    std::vector<double> values(x.begin(), x.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    CutOracle best{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double cut = 0.5 * (values[i] + values[i + 1]);
        std::vector<double> left, right;
        for (std::size_t r = 0; r < x.size(); ++r) (x[r] <= cut ? left : right).push_back(y[r]);
        if (left.size() < min_leaf || right.size() < min_leaf) continue;
        auto sse = [](const std::vector<double>& v) {
            const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            double s = 0.0;
            for (double e : v) s += (e - mean) * (e - mean);
            return s;
        };
        const double total = sse(left) + sse(right);
        if (total < best.sse) best = {cut, total};
    }
    return best;
}

DmOracle dm_recompute(std::span<const double> a, std::span<const double> b, std::size_t h) {
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) d[t] = a[t] * a[t] - b[t] * b[t];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    std::vector<double> gamma(h, 0.0);
    for (std::size_t k = 0; k < h; ++k) {
        for (std::size_t t = k; t < n; ++t) gamma[k] += (d[t] - mean) * (d[t - k] - mean);
        gamma[k] /= static_cast<double>(n);
    }
    double var = gamma[0];
    for (std::size_t k = 1; k < h; ++k) var += 2.0 * gamma[k];
    const double stat = mean / std::sqrt(var / static_cast<double>(n));
    // Two-sided tail of the standard normal through the error function.
    const double p = 2.0 * (1.0 - 0.5 * (1.0 + std::erf(std::abs(stat) / std::sqrt(2.0))));
    return {stat, p};
}

double mutual_information_brute(std::span<const int> a, std::span<const int> b) {
    const int amax = *std::max_element(a.begin(), a.end());
    const int bmax = *std::max_element(b.begin(), b.end());
    std::vector<std::vector<double>> joint(static_cast<std::size_t>(amax + 1),
                                           std::vector<double>(static_cast<std::size_t>(bmax + 1), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) joint[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])] += 1.0;
    const double n = static_cast<double>(a.size());
    double mi = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i) {
        double pa = 0.0;
        for (double c : joint[i]) pa += c / n;
        for (std::size_t j = 0; j < joint[i].size(); ++j) {
            if (joint[i][j] == 0.0) continue;
            double pb = 0.0;
            for (const auto& row : joint) pb += row[j] / n;
            const double pab = joint[i][j] / n;
            mi += pab * std::log(pab / (pa * pb));
        }
    }
    return mi;
}

std::vector<double> rrelieff_recompute(const Rows& rows, std::span<const double> y, std::size_t k) {
    const std::size_t m = rows.size();
    const std::size_t n = rows.front().size();
    std::vector<double> lo(n, std::numeric_limits<double>::infinity()), hi(n, -std::numeric_limits<double>::infinity());
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < n; ++j) {
            lo[j] = std::min(lo[j], r[j]);
            hi[j] = std::max(hi[j], r[j]);
        }
    }
    const double ylo = *std::min_element(y.begin(), y.end());
    const double yhi = *std::max_element(y.begin(), y.end());
    auto diff = [&](std::size_t j, std::size_t p, std::size_t q) {
        return hi[j] > lo[j] ? std::abs(rows[p][j] - rows[q][j]) / (hi[j] - lo[j]) : 0.0;
    };
    double ndc = 0.0;
    std::vector<double> nda(n, 0.0), ndcda(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == i) continue;
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += diff(j, i, r) * diff(j, i, r);
            d.emplace_back(s, r);
        }
        std::sort(d.begin(), d.end());
        for (std::size_t q = 0; q < k; ++q) {
            const std::size_t r = d[q].second;
            const double dy = (yhi > ylo ? std::abs(y[i] - y[r]) / (yhi - ylo) : 0.0) / static_cast<double>(k);
            ndc += dy;
            for (std::size_t j = 0; j < n; ++j) {
                nda[j] += diff(j, i, r) / static_cast<double>(k);
                ndcda[j] += dy * diff(j, i, r);
            }
        }
    }
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j)
        w[j] = ndcda[j] / ndc - (nda[j] - ndcda[j]) / (static_cast<double>(m) - ndc);
    return w;
}

std::vector<double> central_differences(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> theta, double eps) {
    std::vector<double> g(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double saved = theta[k];
        theta[k] = saved + eps;
        const double up = f(theta);
        theta[k] = saved - eps;
        const double down = f(theta);
        theta[k] = saved;
        g[k] = (up - down) / (2.0 * eps);
    }
    return g;
}

GradientAgreement compare_gradients(std::span<const double> analytic, std::span<const double> numeric, double tight,
                                    double floor) {
    GradientAgreement out{0.0, 0.0};
    std::size_t within = 0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        const double scale = std::max({std::abs(analytic[k]), std::abs(numeric[k]), floor});
        const double rel = std::abs(analytic[k] - numeric[k]) / scale;
        out.max_relative = std::max(out.max_relative, rel);
        within += rel <= tight ? 1 : 0;
    }
    out.fraction_within = static_cast<double>(within) / static_cast<double>(analytic.size());
    return out;
}

Rows random_rows(std::mt19937_64& rng, std::size_t count, std::size_t width, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Rows rows(count, std::vector<double>(width));
    for (auto& r : rows)
        for (double& v : r) v = u(rng);
    return rows;
}

AlignedPanel make_panel(const Rows& rows, std::span<const double> y, std::vector<std::string> names) {
    const std::size_t n = rows.front().size();
    if (names.empty())
        for (std::size_t j = 0; j < n; ++j) names.push_back("m" + std::to_string(j + 1));
    std::vector<Timestamp> ts;
    std::vector<double> data;
    const Timestamp start{std::chrono::sys_days{std::chrono::year{2018} / 1 / 1}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ts.push_back(start + std::chrono::hours{static_cast<long>(i)});
        data.insert(data.end(), rows[i].begin(), rows[i].end());
    }
    return align_panel(SeriesFrame(ts, std::vector<double>(y.begin(), y.end())),
                       ForecastPanel(ts, std::move(names), std::move(data)));
}

} // namespace metastack::testing
