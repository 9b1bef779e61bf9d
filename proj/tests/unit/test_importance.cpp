#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "metastack/importance.hpp"
#include "oracles.hpp"

using namespace metastack;
using namespace metastack::importance;
using metastack::testing::kind_of;

namespace {

ForecastPanel panel_of(const testing::Rows& rows, std::vector<std::string> names) {
    std::vector<double> y(rows.size(), 1.0);
    return testing::make_panel(rows, y, std::move(names)).panel();
}

double score_of(const std::vector<FeatureScore>& scores, const std::string& name) {
    for (const auto& s : scores)
        if (s.model == name) return s.score;
    FAIL("missing " << name);
    return 0.0;
}

} // namespace

TEST_CASE("equal-frequency bins") {
    CHECK(equal_frequency_bins(std::vector<double>{4, 1, 3, 2}, 2) == std::vector<int>{1, 0, 1, 0});
    CHECK(equal_frequency_bins(std::vector<double>{5, 5, 5}, 4) == std::vector<int>{0, 0, 0});
    CHECK(equal_frequency_bins(std::vector<double>{1, 2, 2, 3}, 4) == std::vector<int>{0, 1, 1, 3});
    std::vector<double> v(100);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>((i * 37) % 100);
    const auto b = equal_frequency_bins(v, 10);
    for (int k = 0; k < 10; ++k) CHECK(std::count(b.begin(), b.end(), k) == 10);
    CHECK(kind_of([] { equal_frequency_bins(std::vector<double>{1}, 0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("mutual information matches explicit count tables") {
    std::mt19937_64 rng(73);
    std::uniform_int_distribution<int> bin(0, 4);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<int> a(80), b(80);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = bin(rng);
            b[i] = rep % 2 == 0 ? bin(rng) : (a[i] + (bin(rng) == 0 ? 1 : 0)) % 5;
        }
        CHECK(mutual_information(a, b) == doctest::Approx(testing::mutual_information_brute(a, b)).epsilon(1e-12));
        CHECK(mutual_information(a, a) >= mutual_information(a, b) - 1e-12);
    }
    CHECK(mutual_information(std::vector<int>{0, 0, 1, 1}, std::vector<int>{3, 3, 3, 3}) == 0.0);
}

TEST_CASE("MRMR ordering") {
    std::mt19937_64 rng(79);
    std::normal_distribution<double> n01(0, 1);
    testing::Rows rows(300, std::vector<double>(4));
    std::vector<double> y(300);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        y[r] = n01(rng);
        rows[r][0] = n01(rng);                 // noise
        rows[r][1] = y[r] + 0.1 * n01(rng);    // strong
        rows[r][2] = 5.0;                      // constant
        rows[r][3] = y[r] + 1.0 * n01(rng);    // weak
    }
    const auto panel = panel_of(rows, {"noise", "strong", "flat", "weak"});
    const auto scores = mrmr_scores(panel, y, 10);
    REQUIRE(scores.size() == 4);
    CHECK(scores[0].model == "strong");
    CHECK(scores[3].model == "flat");
    CHECK(scores[3].score == 0.0);

    // Column order does not change the result.
    testing::Rows permuted;
    for (const auto& r : rows) permuted.push_back({r[3], r[2], r[1], r[0]});
    const auto again = mrmr_scores(panel_of(permuted, {"weak", "flat", "strong", "noise"}), y, 10);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        CHECK(again[i].model == scores[i].model);
        CHECK(again[i].score == doctest::Approx(scores[i].score).epsilon(1e-12));
    }

    CHECK(kind_of([&] { mrmr_scores(panel, std::vector<double>(10), 10); }) == ErrorKind::LengthMismatch);
    testing::Rows few(10, {1.0, 2.0});
    CHECK(kind_of([&] { mrmr_scores(panel_of(few, {"a", "b"}), std::vector<double>(10), 10); }) == ErrorKind::TooShort);
}

TEST_CASE("RReliefF matches the direct recomputation") {
    std::mt19937_64 rng(83);
    for (int rep = 0; rep < 5; ++rep) {
        const auto rows = testing::random_rows(rng, 60, 4);
        std::vector<double> y;
        for (const auto& r : rows) y.push_back(3 * r[0] + 0.5 * r[1]);
        const auto panel = panel_of(rows, {});
        const auto got = rrelieff_scores(panel, y, 5);
        const auto want = testing::rrelieff_recompute(rows, y, 5);
        for (std::size_t j = 0; j < 4; ++j) CHECK(got[j].score == doctest::Approx(want[j]).epsilon(1e-10));
        CHECK(got[0].score > got[2].score);
        CHECK(got[0].score > got[3].score);
    }
}

TEST_CASE("RReliefF invariances and edge cases") {
    std::mt19937_64 rng(89);
    auto rows = testing::random_rows(rng, 50, 3);
    std::vector<double> y;
    for (auto& r : rows) {
        y.push_back(r[1]);
        r[2] = 7.0;
    }
    const auto base = rrelieff_scores(panel_of(rows, {"a", "b", "c"}), y, 5);
    CHECK(base[2].score == 0.0);
    CHECK(base[1].score > base[0].score);

    testing::Rows scaled = rows;
    for (auto& r : scaled) r[0] = 10 * r[0] + 3;
    const auto affine = rrelieff_scores(panel_of(scaled, {"a", "b", "c"}), y, 5);
    for (std::size_t j = 0; j < 3; ++j) CHECK(affine[j].score == doctest::Approx(base[j].score).epsilon(1e-10));

    testing::Rows swapped;
    for (const auto& r : rows) swapped.push_back({r[1], r[0], r[2]});
    const auto perm = rrelieff_scores(panel_of(swapped, {"b", "a", "c"}), y, 5);
    CHECK(score_of(perm, "a") == doctest::Approx(base[0].score).epsilon(1e-10));
    CHECK(score_of(perm, "b") == doctest::Approx(base[1].score).epsilon(1e-10));

    const auto sampled = rrelieff_scores(panel_of(rows, {"a", "b", "c"}), y, 5, 20);
    CHECK(sampled.size() == 3);
    CHECK(kind_of([&] { rrelieff_scores(panel_of(rows, {"a", "b", "c"}), y, 50); }) == ErrorKind::TooShort);
}
