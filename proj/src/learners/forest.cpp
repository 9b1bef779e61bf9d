#include "metastack/learners/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace metastack::learners {

double RegressionTree::predict(std::span<const double> query) const {
    std::uint32_t at = 0;
    while (!nodes_[at].is_leaf()) {
        const TreeNode& node = nodes_[at];
        at = query[static_cast<std::size_t>(node.feature)] <= node.cutpoint ? node.left : node.right;
    }
    return nodes_[at].label;
}

double Forest::predict(std::span<const double> query) const {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& tree : trees_) {
        const double v = tree.predict(query);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // The average lies between the extreme responses; clamp away rounding drift.
    return std::clamp(sum / static_cast<double>(trees_.size()), lo, hi);
}

std::size_t default_features_per_split(std::size_t inputs) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(inputs) / 3.0)));
}

namespace {

struct Split {
    double sse = std::numeric_limits<double>::infinity();
    std::int32_t feature = TreeNode::kLeaf;
    double cutpoint = 0.0;
};

struct Entry {
    double x;
    std::uint32_t unit;
};

// Grows one tree. A bootstrap sample is held as weighted units (distinct
// training positions with their multiplicity). Every feature keeps its own
// value-sorted ordering of the units; a node owns the same contiguous range
// [begin, end) in all of them.
class TreeGrower {
public:
    TreeGrower(const std::vector<std::vector<double>>& columns, const std::vector<std::vector<std::uint32_t>>& sorted,
               std::span<const double> targets, std::span<const std::uint32_t> multiplicity,
               std::size_t features_per_split, std::size_t min_leaf, std::mt19937_64& rng)
        : r_(features_per_split), q_(static_cast<double>(min_leaf)), rng_(rng), order_(columns.size()),
          feature_pool_(columns.size()) {
        std::vector<std::uint32_t> unit_of(multiplicity.size());
        for (std::size_t pos = 0; pos < multiplicity.size(); ++pos) {
            if (multiplicity[pos] == 0) continue;
            unit_of[pos] = static_cast<std::uint32_t>(ys_.size());
            ys_.push_back(targets[pos]);
            ws_.push_back(static_cast<double>(multiplicity[pos]));
        }
        for (std::size_t f = 0; f < columns.size(); ++f) {
            auto& ord = order_[f];
            ord.reserve(ys_.size());
            for (std::uint32_t pos : sorted[f]) {
                if (multiplicity[pos] > 0) ord.push_back({columns[f][pos], unit_of[pos]});
            }
        }
        goes_left_.resize(ys_.size());
        scratch_.resize(ys_.size());
    }

    std::vector<TreeNode> grow() {
        struct Pending {
            std::uint32_t node;
            std::uint32_t begin;
            std::uint32_t end;
        };
        std::vector<TreeNode> nodes(1);
        std::vector<Pending> stack{{0, 0, static_cast<std::uint32_t>(ys_.size())}};
        while (!stack.empty()) {
            const Pending job = stack.back();
            stack.pop_back();

            const NodeStats stats = node_stats(job.begin, job.end);
            nodes[job.node].count = static_cast<std::uint32_t>(stats.weight);

            const Split split = find_split(job.begin, job.end, stats);
            if (split.feature == TreeNode::kLeaf) {
                nodes[job.node].label = stats.constant ? stats.first : stats.sum / stats.weight;
                continue;
            }
            const std::uint32_t mid = partition(job.begin, job.end, split);
            const auto left = static_cast<std::uint32_t>(nodes.size());
            TreeNode& node = nodes[job.node];
            node.feature = split.feature;
            node.cutpoint = split.cutpoint;
            node.left = left;
            node.right = left + 1;
            nodes.emplace_back();
            nodes.emplace_back();
            stack.push_back({left + 1, mid, job.end});
            stack.push_back({left, job.begin, mid});
        }
        return nodes;
    }

private:
    struct NodeStats {
        double weight = 0.0;
        double sum = 0.0;
        double first = 0.0;
        bool constant = true;
    };

    NodeStats node_stats(std::uint32_t begin, std::uint32_t end) const {
        const auto& ord = order_.front();
        NodeStats st;
        st.first = ys_[ord[begin].unit];
        for (std::uint32_t i = begin; i < end; ++i) {
            const double y = ys_[ord[i].unit];
            const double w = ws_[ord[i].unit];
            st.weight += w;
            st.sum += w * y;
            st.constant = st.constant && y == st.first;
        }
        return st;
    }

    Split find_split(std::uint32_t begin, std::uint32_t end, const NodeStats& stats) {
        Split best;
        const double weight = stats.weight;
        if (weight < 2.0 * q_ || stats.constant) return best;
        const double mean = stats.sum / weight;

        // Totals are the same for every feature ordering of the node.
        double total_sum = 0.0;
        double total_sq = 0.0;
        for (std::uint32_t i = begin; i < end; ++i) {
            const auto u = order_.front()[i].unit;
            const double y = ys_[u] - mean;
            total_sum += ws_[u] * y;
            total_sq += ws_[u] * y * y;
        }

        std::iota(feature_pool_.begin(), feature_pool_.end(), 0u);
        const std::size_t r = std::min(r_, feature_pool_.size());
        for (std::size_t i = 0; i < r; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, feature_pool_.size() - 1);
            std::swap(feature_pool_[i], feature_pool_[pick(rng_)]);
        }
        std::sort(feature_pool_.begin(), feature_pool_.begin() + static_cast<std::ptrdiff_t>(r));

        for (std::size_t fi = 0; fi < r; ++fi) {
            const std::uint32_t f = feature_pool_[fi];
            const auto& ord = order_[f];
            double left_w = 0.0;
            double left_sum = 0.0;
            double left_sq = 0.0;
            for (std::uint32_t i = begin; i + 1 < end; ++i) {
                const double w = ws_[ord[i].unit];
                const double y = ys_[ord[i].unit] - mean;
                left_w += w;
                left_sum += w * y;
                left_sq += w * y * y;
                const double right_w = weight - left_w;
                if (left_w < q_ || right_w < q_) continue;
                const double a = ord[i].x;
                const double b = ord[i + 1].x;
                if (!(a < b)) continue;
                const double right_sum = total_sum - left_sum;
                const double right_sq = total_sq - left_sq;
                const double sse = (left_sq - left_sum * left_sum / left_w) + (right_sq - right_sum * right_sum / right_w);
                if (sse < best.sse) {
                    double cut = a + 0.5 * (b - a);
                    if (!(cut < b)) cut = a;
                    best = {sse, static_cast<std::int32_t>(f), cut};
                }
            }
        }
        return best;
    }

    std::uint32_t partition(std::uint32_t begin, std::uint32_t end, const Split& split) {
        const auto feature = static_cast<std::size_t>(split.feature);
        // The split feature is sorted, so its left child is a prefix.
        const auto& sorted = order_[feature];
        std::uint32_t mid = begin;
        while (mid < end && sorted[mid].x <= split.cutpoint) goes_left_[sorted[mid++].unit] = 1;
        for (std::uint32_t i = mid; i < end; ++i) goes_left_[sorted[i].unit] = 0;

        for (std::size_t f = 0; f < order_.size(); ++f) {
            if (f == feature) continue;
            auto& ord = order_[f];
            std::uint32_t l = begin;
            std::uint32_t r = 0;
            for (std::uint32_t i = begin; i < end; ++i) {
                if (goes_left_[ord[i].unit]) ord[l++] = ord[i];
                else scratch_[r++] = ord[i];
            }
            std::copy(scratch_.begin(), scratch_.begin() + r, ord.begin() + l);
        }
        return mid;
    }

    std::size_t r_;
    double q_;
    std::mt19937_64& rng_;
    std::vector<double> ys_;
    std::vector<double> ws_;
    std::vector<std::vector<Entry>> order_;
    std::vector<char> goes_left_;
    std::vector<Entry> scratch_;
    std::vector<std::uint32_t> feature_pool_;
};

} // namespace

Forest rf_fit(const TrainingSet& train, const ForestOptions& options) {
    require(!train.empty(), ErrorKind::EmptyTrainingSet, "random forest needs at least one training pair");
    require(options.trees >= 1, ErrorKind::InvalidArgument, "forest needs at least one tree");
    require(options.min_leaf >= 1, ErrorKind::InvalidArgument, "minimum leaf size must be >= 1");
    const std::size_t n = train.width();
    const std::size_t r = options.features_per_split == 0 ? default_features_per_split(n) : options.features_per_split;
    require(r >= 1 && r <= n, ErrorKind::InvalidArgument, "features per split must lie in [1, n]");

    std::vector<std::vector<double>> columns(n, std::vector<double>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto p = train.pattern(i);
        for (std::size_t f = 0; f < n; ++f) columns[f][i] = p[f];
    }

    std::vector<std::vector<std::uint32_t>> sorted(n, std::vector<std::uint32_t>(train.size()));
    for (std::size_t f = 0; f < n; ++f) {
        std::iota(sorted[f].begin(), sorted[f].end(), 0u);
        const auto& col = columns[f];
        std::stable_sort(sorted[f].begin(), sorted[f].end(),
                         [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }

    std::mt19937_64 rng(options.seed);
    const auto size = static_cast<std::uint32_t>(train.size());
    std::vector<RegressionTree> trees;
    trees.reserve(options.trees);
    std::vector<std::uint32_t> multiplicity(size);
    for (std::size_t j = 0; j < options.trees; ++j) {
        if (options.bootstrap) {
            std::fill(multiplicity.begin(), multiplicity.end(), 0u);
            std::uniform_int_distribution<std::uint32_t> draw(0, size - 1);
            for (std::uint32_t i = 0; i < size; ++i) ++multiplicity[draw(rng)];
        } else {
            std::fill(multiplicity.begin(), multiplicity.end(), 1u);
        }
        TreeGrower grower(columns, sorted, train.targets(), multiplicity, r, options.min_leaf, rng);
        trees.emplace_back(grower.grow());
    }
    return Forest(std::move(trees), r, options.min_leaf);
}

} // namespace metastack::learners
