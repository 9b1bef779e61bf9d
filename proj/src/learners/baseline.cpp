#include "metastack/learners/baseline.hpp"

#include <algorithm>
#include <vector>

#include "metastack/error.hpp"

namespace metastack::learners {

double combine_mean(std::span<const double> query) {
    require(!query.empty(), ErrorKind::EmptyQuery, "mean of an empty query");
    double sum = 0.0;
    for (double v : query) sum += v;
    // Rounding can push the quotient one ulp past the extremes (e.g. three equal values).
    const auto [lo, hi] = std::minmax_element(query.begin(), query.end());
    return std::clamp(sum / static_cast<double>(query.size()), *lo, *hi);
}

double combine_median(std::span<const double> query) {
    require(!query.empty(), ErrorKind::EmptyQuery, "median of an empty query");
    std::vector<double> v(query.begin(), query.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

} // namespace metastack::learners
