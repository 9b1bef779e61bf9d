#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metastack/core.hpp"

namespace metastack::learners {

struct ForestOptions {
    std::size_t trees = 100;             ///< p
    std::size_t min_leaf = 1;            ///< q, minimum observations per leaf
    std::size_t features_per_split = 0;  ///< r; 0 selects max(1, round(n/3))
    bool bootstrap = true;               ///< disable only to compare single trees against oracles
    std::uint64_t seed = 0;
};

struct TreeNode {
    static constexpr std::int32_t kLeaf = -1;

    std::int32_t feature = kLeaf;
    double cutpoint = 0.0;  ///< x[feature] <= cutpoint goes left
    double label = 0.0;     ///< mean target of the samples reaching a leaf
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t count = 0;

    bool is_leaf() const noexcept { return feature == kLeaf; }
};

class RegressionTree {
public:
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    double predict(std::span<const double> query) const;
    const TreeNode& root() const { return nodes_.front(); }
    std::span<const TreeNode> nodes() const noexcept { return nodes_; }

private:
    std::vector<TreeNode> nodes_;
};

class Forest {
public:
    Forest(std::vector<RegressionTree> trees, std::size_t features_per_split, std::size_t min_leaf)
        : trees_(std::move(trees)), features_per_split_(features_per_split), min_leaf_(min_leaf) {}

    /// Average of the tree responses.
    double predict(std::span<const double> query) const;

    std::span<const RegressionTree> trees() const noexcept { return trees_; }
    std::size_t features_per_split() const noexcept { return features_per_split_; }
    std::size_t min_leaf() const noexcept { return min_leaf_; }

private:
    std::vector<RegressionTree> trees_;
    std::size_t features_per_split_;
    std::size_t min_leaf_;
};

std::size_t default_features_per_split(std::size_t inputs);

Forest rf_fit(const TrainingSet& train, const ForestOptions& options);

inline double rf_predict(const Forest& forest, std::span<const double> query) { return forest.predict(query); }

} // namespace metastack::learners
