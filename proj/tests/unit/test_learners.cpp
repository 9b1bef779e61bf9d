#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "metastack/learners.hpp"
#include "metastack/learners/baseline.hpp"
#include "oracles.hpp"

using namespace metastack;
using namespace metastack::learners;
using metastack::testing::kind_of;
using metastack::testing::Rows;

namespace {

std::vector<double> column(const Rows& rows, std::size_t j) {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
}

} // namespace

TEST_CASE("mean and median baselines") {
    CHECK(combine_mean(std::vector<double>{1, 2, 3, 4}) == 2.5);
    CHECK(combine_mean(std::vector<double>{7, 7, 7}) == 7.0);
    CHECK(combine_mean(std::vector<double>{-1, 1}) == 0.0);
    CHECK(combine_median(std::vector<double>{1, 2, 100}) == 2.0);
    CHECK(combine_median(std::vector<double>{1, 2, 3, 100}) == 2.5);
    CHECK(combine_median(std::vector<double>{5}) == 5.0);
    CHECK(kind_of([] { combine_mean(std::vector<double>{}); }) == ErrorKind::EmptyQuery);
    CHECK(kind_of([] { combine_median(std::vector<double>{}); }) == ErrorKind::EmptyQuery);
}

TEST_CASE("baselines never leave the base-forecast range") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 500; ++rep) {
        const auto q = testing::random_rows(rng, 1, 1 + rng() % 16, 1e3, 1e3 + 1e-9 * (rep % 3 + 1)).front();
        const auto z = z_interval(q);
        REQUIRE(z.contains(combine_mean(q)));
        REQUIRE(z.contains(combine_median(q)));
    }
}

TEST_CASE("linear regression recovers an exact relation") {
    const auto train = TrainingSet::from_rows({{1}, {2}, {3}}, {3, 5, 7});
    const auto fit = lr_combine(train, std::vector<double>{10});
    CHECK(fit.forecast == doctest::Approx(21.0).epsilon(1e-12));
    CHECK(fit.coeffs.intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.coeffs.slopes.at(0) == doctest::Approx(2.0).epsilon(1e-12));

    const auto single = TrainingSet::from_rows({{4}}, {9});
    CHECK(lr_combine(single, std::vector<double>{4}).forecast == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("linear regression matches the pseudo-inverse oracle") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 30; ++rep) {
        auto rows = testing::random_rows(rng, 20, 5);
        if (rep % 3 == 0)
            for (auto& r : rows) r[2] = 2.0 * r[0];
        const auto y = column(testing::random_rows(rng, 20, 1), 0);
        const auto q = testing::random_rows(rng, 1, 5).front();
        const double want = testing::linear_forecast(testing::pseudo_inverse_beta(rows, y), q);
        CHECK(std::abs(lr_combine(TrainingSet::from_rows(rows, y), q).forecast - want) <= 1e-8);
    }
}

TEST_CASE("kNN hand-checked cases") {
    const auto one = TrainingSet::from_rows({{1}}, {2});
    CHECK(knn_combine(one, std::vector<double>{5}, {3, 0.05}) == 2.0);

    const auto sym = TrainingSet::from_rows({{0}, {2}, {9}}, {1, 3, 100});
    CHECK(knn_combine(sym, std::vector<double>{1}, {2, 0.5}) == doctest::Approx(2.0).epsilon(1e-14));

    // Distances 0.9, 0.1, 1.1; median 0.9; sigma 0.45.
    const auto three = TrainingSet::from_rows({{0}, {1}, {2}}, {0, 1, 4});
    const double s2 = 0.45 * 0.45;
    const double w0 = std::exp(-0.81 / s2), w1 = std::exp(-0.01 / s2), w2 = std::exp(-1.21 / s2);
    const double want = (w1 * 1 + w2 * 4) / (w0 + w1 + w2);
    const auto got = knn_predict(three, std::vector<double>{0.9}, {3, 0.5});
    CHECK(got.forecast == doctest::Approx(want).epsilon(1e-13));
    CHECK(got.sigma == doctest::Approx(0.45).epsilon(1e-15));
}

TEST_CASE("kNN bandwidth falls back when the median distance is zero") {
    CHECK(knn_bandwidth(std::vector<double>{0, 0, 0, 3}, 0.5) == doctest::Approx(0.5 * 0.75));
    CHECK(knn_bandwidth(std::vector<double>{0, 0, 0}, 0.5) == 0.5);
    CHECK(knn_bandwidth(std::vector<double>{1, 2, 3, 4}, 0.5) == doctest::Approx(1.25));
    const auto dup = TrainingSet::from_rows({{1}, {1}, {1}}, {2, 4, 6});
    CHECK(knn_combine(dup, std::vector<double>{1}, {3, 0.05}) == doctest::Approx(4.0));
}

TEST_CASE("kNN stays within its neighbours' targets and matches brute force") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 50; ++rep) {
        const auto rows = testing::random_rows(rng, 40, 3);
        const auto y = column(testing::random_rows(rng, 40, 1, 0.0, 10.0), 0);
        const auto q = testing::random_rows(rng, 1, 3).front();
        const auto res = knn_predict(TrainingSet::from_rows(rows, y), q, {7, 0.05});
        double lo = 1e300, hi = -1e300;
        for (auto pos : res.neighbours) {
            lo = std::min(lo, y[pos]);
            hi = std::max(hi, y[pos]);
        }
        CHECK(res.neighbours.size() == 7);
        CHECK(res.forecast >= lo);
        CHECK(res.forecast <= hi);
        CHECK(std::abs(res.forecast - testing::knn_brute_force(rows, y, q, 7, 0.05)) <= 1e-12);
    }
}

TEST_CASE("mean, median, LR and kNN are scale equivariant") {
    constexpr double s = 4.0;
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        const auto rows = testing::random_rows(rng, 30, 4, 50, 150);
        const auto y = column(testing::random_rows(rng, 30, 1, 50, 150), 0);
        const auto q = testing::random_rows(rng, 1, 4, 50, 150).front();
        auto rows_s = rows;
        for (auto& r : rows_s)
            for (double& v : r) v *= s;
        auto y_s = y;
        for (double& v : y_s) v *= s;
        auto q_s = q;
        for (double& v : q_s) v *= s;
        const auto train = TrainingSet::from_rows(rows, y);
        const auto train_s = TrainingSet::from_rows(rows_s, y_s);
        CHECK(combine_mean(q_s) == s * combine_mean(q));
        CHECK(combine_median(q_s) == s * combine_median(q));
        CHECK(knn_combine(train_s, q_s, {10, 0.05}) == s * knn_combine(train, q, {10, 0.05}));
        const double lr = lr_combine(train, q).forecast;
        CHECK(std::abs(lr_combine(train_s, q_s).forecast - s * lr) <= 1e-12 * std::abs(s * lr));
    }
}

TEST_CASE("kNN with all neighbours and a huge bandwidth is the target mean") {
    std::mt19937_64 rng(31);
    const auto rows = testing::random_rows(rng, 25, 3);
    const auto y = column(testing::random_rows(rng, 25, 1, 0, 50), 0);
    double mean = 0;
    for (double v : y) mean += v / 25.0;
    CHECK(std::abs(knn_combine(TrainingSet::from_rows(rows, y), std::vector<double>{0, 0, 0}, {25, 1e6}) - mean) <= 1e-6);
}

TEST_CASE("MLP forward pass") {
    // Hidden weights zero: every activation is 0 and only v0 remains.
    std::vector<double> p(MlpModel::parameter_count(3, 2), 0.0);
    p[2 * 4] = 0.7;
    p[2 * 4 + 1] = -4.0;
    p.back() = 1.5;
    CHECK(MlpModel(3, 2, p).predict(std::vector<double>{1, 2, 3}) == 1.5);

    // w0 = 0, w1 = 1, v1 = 2, v0 = 0.
    const MlpModel one(1, 1, {0.0, 1.0, 2.0, 0.0});
    const double phi = 2.0 / (1.0 + std::exp(-0.6)) - 1.0;
    CHECK(one.predict(std::vector<double>{0.6}) == doctest::Approx(2.0 * phi).epsilon(1e-14));
}

TEST_CASE("MLP gradient matches central differences") {
    std::mt19937_64 rng(37);
    const auto rows = testing::random_rows(rng, 10, 3);
    const auto y = column(testing::random_rows(rng, 10, 1), 0);
    const auto train = TrainingSet::from_rows(rows, y);
    for (std::size_t hidden : {1u, 3u}) {
        MlpOptions opt;
        opt.hidden = hidden;
        opt.epochs = 3;
        const auto model = mlp_fit(train, opt);
        const std::vector<double> theta(model.parameters().begin(), model.parameters().end());
        const auto g = mlp_sse_gradient(model, train);
        const auto fd = testing::central_differences(
            [&](const std::vector<double>& p) { return mlp_sse(MlpModel(3, hidden, p, model.scaling()), train); },
            theta, 1e-5);
        CHECK(testing::compare_gradients(g, fd, 1e-4).max_relative <= 1e-4);
    }
}

TEST_CASE("MLP training is deterministic and fits a smooth relation") {
    std::mt19937_64 rng(41);
    const auto rows = testing::random_rows(rng, 200, 2);
    std::vector<double> y;
    for (const auto& r : rows) y.push_back(100 + 10 * std::tanh(r[0] - r[1]));
    const auto train = TrainingSet::from_rows(rows, y);
    MlpOptions opt;
    opt.hidden = 3;
    opt.seed = 9;
    const auto a = mlp_fit(train, opt);
    const auto b = mlp_fit(train, opt);
    CHECK(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
    CHECK(mlp_sse(a, train) / 200.0 < 0.05);
    opt.epochs = 1;
    CHECK(mlp_sse(mlp_fit(train, opt), train) > mlp_sse(a, train));
}

TEST_CASE("regression trees") {
    SUBCASE("constant targets give a constant forest") {
        const auto train = TrainingSet::from_rows({{1, 2}, {3, 4}, {5, 0}}, {7, 7, 7});
        const auto forest = rf_fit(train, {10, 1, 0, true, 3});
        CHECK(forest.predict(std::vector<double>{100, -100}) == 7.0);
    }
    SUBCASE("four-point step") {
        const auto train = TrainingSet::from_rows({{0}, {1}, {2}, {3}}, {0, 0, 10, 10});
        const auto forest = rf_fit(train, {1, 1, 1, false, 0});
        const auto& root = forest.trees().front().root();
        CHECK(root.cutpoint > 1.0);
        CHECK(root.cutpoint < 2.0);
        CHECK(root.cutpoint == doctest::Approx(testing::exhaustive_cut(std::vector<double>{0, 1, 2, 3},
                                                                       std::vector<double>{0, 0, 10, 10})
                                                   .cutpoint));
        CHECK(forest.predict(std::vector<double>{0.5}) == 0.0);
        CHECK(forest.predict(std::vector<double>{2.5}) == 10.0);
    }
    SUBCASE("memorizes distinct patterns without bootstrap") {
        std::mt19937_64 rng(43);
        const auto rows = testing::random_rows(rng, 100, 4);
        const auto y = column(testing::random_rows(rng, 100, 1), 0);
        const auto forest = rf_fit(TrainingSet::from_rows(rows, y), {1, 1, 0, false, 1});
        for (std::size_t i = 0; i < rows.size(); ++i) REQUIRE(forest.predict(rows[i]) == y[i]);
    }
    SUBCASE("leaves hold at least q observations and forecasts stay in the target range") {
        std::mt19937_64 rng(47);
        const auto rows = testing::random_rows(rng, 150, 3);
        const auto y = column(testing::random_rows(rng, 150, 1, -5, 5), 0);
        const auto forest = rf_fit(TrainingSet::from_rows(rows, y), {20, 4, 0, true, 2});
        for (const auto& tree : forest.trees())
            for (const auto& node : tree.nodes())
                if (node.is_leaf()) REQUIRE(node.count >= 4);
        const double lo = *std::min_element(y.begin(), y.end());
        const double hi = *std::max_element(y.begin(), y.end());
        for (const auto& q : testing::random_rows(rng, 100, 3, -3, 3)) {
            const double f = forest.predict(q);
            REQUIRE(f >= lo);
            REQUIRE(f <= hi);
        }
    }
    SUBCASE("features per split") {
        CHECK(default_features_per_split(1) == 1);
        CHECK(default_features_per_split(2) == 1);
        CHECK(default_features_per_split(5) == 2);
        CHECK(default_features_per_split(8) == 3);
        CHECK(default_features_per_split(16) == 5);
        const auto train = TrainingSet::from_rows({{1, 2}, {3, 4}}, {1, 2});
        CHECK(kind_of([&] { rf_fit(train, {1, 1, 3, true, 0}); }) == ErrorKind::InvalidArgument);
    }
    SUBCASE("split oracle on one feature") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            std::mt19937_64 rng(seed);
            const auto rows = testing::random_rows(rng, 30, 1);
            const auto y = column(testing::random_rows(rng, 30, 1), 0);
            const auto forest = rf_fit(TrainingSet::from_rows(rows, y), {1, 3, 1, false, 0});
            const auto oracle = testing::exhaustive_cut(column(rows, 0), y, 3);
            REQUIRE(forest.trees().front().root().cutpoint == doctest::Approx(oracle.cutpoint).epsilon(1e-12));
        }
    }
}

TEST_CASE("LSTM") {
    SUBCASE("zero weights output the head bias") {
        std::vector<double> p(LstmModel::parameter_count(2, 3), 0.0);
        p.back() = 3.0;
        const LstmModel model(2, 3, p);
        const auto history = TrainingSet::from_rows({{1, 2}, {3, 4}}, {0, 0});
        CHECK(model.predict(history, std::vector<double>{5, 6}) == 3.0);
    }
    SUBCASE("gradient matches central differences on a length-8 sequence") {
        std::mt19937_64 rng(53);
        const auto rows = testing::random_rows(rng, 8, 3);
        const auto y = column(testing::random_rows(rng, 8, 1), 0);
        const auto seq = TrainingSet::from_rows(rows, y);
        LstmOptions opt;
        opt.hidden = 4;
        opt.epochs = 2;
        const auto model = lstm_fit(seq, opt);
        const std::vector<double> theta(model.parameters().begin(), model.parameters().end());
        const auto g = lstm_sse_gradient(model, seq);
        const auto fd = testing::central_differences(
            [&](const std::vector<double>& p) { return lstm_sequence_sse(LstmModel(3, 4, p, model.scaling()), seq); },
            theta, 1e-5);
        const auto agreement = testing::compare_gradients(g, fd, 1e-4);
        CHECK(agreement.fraction_within >= 0.95);
        CHECK(agreement.max_relative <= 1e-3);
    }
    SUBCASE("deterministic fit, history-dependent forecast") {
        std::mt19937_64 rng(59);
        const auto rows = testing::random_rows(rng, 30, 2);
        const auto y = column(testing::random_rows(rng, 30, 1), 0);
        const auto seq = TrainingSet::from_rows(rows, y);
        LstmOptions opt;
        opt.hidden = 3;
        opt.epochs = 20;
        opt.seed = 4;
        const auto a = lstm_fit(seq, opt);
        const auto b = lstm_fit(seq, opt);
        CHECK(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
        const std::vector<double> q{0.1, 0.2};
        CHECK(a.predict(seq, q) == b.predict(seq, q));
        const auto shorter = seq.subset(std::vector<std::size_t>{25, 26, 27, 28, 29});
        CHECK(a.predict(seq, q) != a.predict(shorter, q));
    }
    SUBCASE("training lowers the sequence error") {
        std::vector<std::vector<double>> rows;
        std::vector<double> y;
        for (int t = 0; t < 48; ++t) {
            const double v = std::sin(t * 0.5);
            rows.push_back({v, std::cos(t * 0.5)});
            y.push_back(10 + 2 * v);
        }
        const auto seq = TrainingSet::from_rows(rows, y);
        LstmOptions opt;
        opt.hidden = 4;
        opt.epochs = 1;
        const double before = lstm_sequence_sse(lstm_fit(seq, opt), seq);
        opt.epochs = 200;
        CHECK(lstm_sequence_sse(lstm_fit(seq, opt), seq) < 0.5 * before);
    }
}

TEST_CASE("meta-model dispatch") {
    std::mt19937_64 rng(61);
    const auto rows = testing::random_rows(rng, 40, 3);
    const auto y = column(testing::random_rows(rng, 40, 1), 0);
    const auto train = TrainingSet::from_rows(rows, y);
    const std::vector<double> q{0.2, -0.1, 0.4};
    Hyperparameters hyper;
    hyper.knn = {5, 0.5};
    CHECK(predict(fit_meta_model(LearnerKind::Linear, train, hyper, 41), q) == lr_combine(train, q).forecast);
    CHECK(predict(fit_meta_model(LearnerKind::Knn, train, hyper, 41), q) == knn_combine(train, q, hyper.knn));
    CHECK(predict(fit_meta_model(LearnerKind::Mean, train, hyper, 41), q) == combine_mean(q));
    const auto lstm = fit_meta_model(LearnerKind::Lstm, train, hyper, 41);
    CHECK(kind_of([&] { predict(lstm, q); }) == ErrorKind::InvalidArgument);
    CHECK(parse_learner("rf") == LearnerKind::Forest);
    CHECK_FALSE(parse_learner("svm").has_value());
    CHECK(to_string(LearnerKind::Knn) == "knn");
}
