#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::testing {

using Rows = std::vector<std::vector<double>>;

// Plain Gauss-Jordan on the normal equations (X'X) beta = X'y, X = [1 | rows].
std::vector<double> normal_equations_beta(const Rows& rows, std::span<const double> y);

// beta = pinv(X) y with the pseudo-inverse built from a Jacobi SVD.
std::vector<double> pseudo_inverse_beta(const Rows& rows, std::span<const double> y);

double linear_forecast(std::span<const double> beta, std::span<const double> query);

// Direct Gaussian-kernel average over the k nearest rows (ties to the lower
// index), sigma = b * median of all distances, no numerical safeguards.
double knn_brute_force(const Rows& rows, std::span<const double> y, std::span<const double> query, std::size_t k,
                       double b);

struct CutOracle {
    double cutpoint;
    double sse;
};

// Best single-feature split by enumerating every midpoint between distinct
// sorted values and summing squared deviations on each side from scratch.
CutOracle exhaustive_cut(std::span<const double> x, std::span<const double> y, std::size_t min_leaf = 1);

// Loss differential d = a^2 - b^2, HAC variance up to lag h-1, statistic and
// two-sided normal p-value, each step written out separately.
struct DmOracle {
    double statistic;
    double p_value;
};
DmOracle dm_recompute(std::span<const double> a, std::span<const double> b, std::size_t h);

// Plug-in mutual information from explicit count tables.
double mutual_information_brute(std::span<const int> a, std::span<const int> b);

// RReliefF accumulation written straight from the definition, with a full
// sort of all distances per instance.
std::vector<double> rrelieff_recompute(const Rows& rows, std::span<const double> y, std::size_t k);

// Central differences of f at theta, one parameter at a time.
std::vector<double> central_differences(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> theta, double eps);

struct GradientAgreement {
    double max_relative;
    double fraction_within;  // share of parameters within the tight tolerance
};
// Relative error |a - n| / max(|a|, |n|, floor) per parameter.
GradientAgreement compare_gradients(std::span<const double> analytic, std::span<const double> numeric,
                                    double tight, double floor = 1e-6);

Rows random_rows(std::mt19937_64& rng, std::size_t count, std::size_t width, double lo = -1.0, double hi = 1.0);

// Aligned panel from explicit rows; timestamps are consecutive hours.
AlignedPanel make_panel(const Rows& rows, std::span<const double> y, std::vector<std::string> names = {});

} // namespace metastack::testing
