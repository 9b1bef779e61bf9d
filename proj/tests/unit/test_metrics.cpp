#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "metastack/metrics.hpp"
#include "oracles.hpp"

using namespace metastack;
using namespace metastack::metrics;
using metastack::testing::kind_of;

TEST_CASE("error summaries") {
    const std::vector<double> y{100, 200, 50, 400};
    const std::vector<double> f{110, 190, 50, 300};
    const auto pe = percentage_errors(y, f);
    CHECK(pe[0] == doctest::Approx(-10));
    CHECK(pe[1] == doctest::Approx(5));
    CHECK(pe[2] == 0.0);
    CHECK(pe[3] == doctest::Approx(25));
    const auto r = summarize(y, f);
    CHECK(r.count == 4);
    CHECK(r.mape == doctest::Approx(10));
    CHECK(r.mdape == doctest::Approx(7.5));
    CHECK(r.mse == doctest::Approx((100.0 + 100 + 0 + 10000) / 4));
    CHECK(r.mpe == doctest::Approx(5));
    const double var = (225.0 + 0 + 25 + 400) / 3;
    CHECK(r.stdpe == doctest::Approx(std::sqrt(var)));

    const auto one = summarize(std::vector<double>{10}, std::vector<double>{12});
    CHECK(one.stdpe == 0.0);
    CHECK(one.mdape == doctest::Approx(20));

    CHECK(kind_of([] { percentage_errors(std::vector<double>{0, 1}, std::vector<double>{1, 1}); }) ==
          ErrorKind::ZeroTarget);
    CHECK(kind_of([] { summarize(std::vector<double>{1}, std::vector<double>{1, 2}); }) == ErrorKind::LengthMismatch);
    CHECK(kind_of([] { summarize(std::vector<double>{}, std::vector<double>{}); }) == ErrorKind::TooShort);
}

TEST_CASE("Diebold-Mariano") {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> n01(0, 1);
    for (std::size_t h : {1u, 3u}) {
        std::vector<double> a(60), b(60);
        for (auto& v : a) v = n01(rng);
        for (auto& v : b) v = 1.5 * n01(rng);
        const auto got = dm_test(a, b, h);
        const auto want = testing::dm_recompute(a, b, h);
        CHECK(got.statistic == doctest::Approx(want.statistic).epsilon(1e-12));
        CHECK(got.p_value == doctest::Approx(want.p_value).epsilon(1e-10));
        const auto swapped = dm_test(b, a, h);
        CHECK(swapped.statistic == doctest::Approx(-got.statistic).epsilon(1e-12));
    }

    std::vector<double> e(20, 1.0);
    const auto same = dm_test(e, e);
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);
    CHECK_FALSE(same.significant);

    std::vector<double> small(20, 0.5);
    const auto constant = dm_test(small, e);
    CHECK(std::isinf(constant.statistic));
    CHECK(constant.statistic < 0);
    CHECK(constant.significant);

    CHECK(kind_of([] { dm_test(std::vector<double>(9, 1.0), std::vector<double>(9, 2.0)); }) == ErrorKind::TooShort);
    CHECK(kind_of([] { dm_test(std::vector<double>(12, 1.0), std::vector<double>(11, 2.0)); }) ==
          ErrorKind::LengthMismatch);
    CHECK(normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(normal_two_sided_p(0.0) == 1.0);
}

TEST_CASE("ranking shares tied positions") {
    const auto tally = rank_models({{1.0, 1.0, 2.0}, {3.0, 2.0, 1.0}}, {"a", "b", "c"});
    CHECK(tally.models == std::vector<std::string>{"a", "b", "c"});
    CHECK(tally.tallies[0] == std::vector<std::size_t>{1, 0, 1});
    CHECK(tally.tallies[1] == std::vector<std::size_t>{1, 1, 0});
    CHECK(tally.tallies[2] == std::vector<std::size_t>{1, 0, 1});
    CHECK(kind_of([] { rank_models({{1.0}}, {"a"}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { rank_models({}, {"a", "b"}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { rank_models({{1.0}}, {"a", "b"}); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("extrapolation counts") {
    const std::vector<std::vector<double>> q{{10, 12}, {10, 12}, {10, 12}, {10, 12}};
    const std::vector<double> meta{11, 13, 13, 9};
    const std::vector<double> y{11, 14, 11, 11};
    const std::vector<double> med{11, 11, 11, 11};
    const auto c = extrapolation_counts(meta, q, y, med);
    CHECK(c.n1 == 3);
    CHECK(c.n2 == 1);
    CHECK(c.n3 == 1);
}
