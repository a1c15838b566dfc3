#pragma once

#include <memory>
#include <vector>

#include <json.hpp>

#include "opclass/dataset.hpp"

namespace opclass {

struct TrainControl {
    double min_leaf_weight = 2.0;
    int max_depth = 25;
    double laplace_alpha = 1.0;
};

// Binary gain-ratio tree. Split nodes route `value <= threshold` left (ties
// left); a MISSING value at the split feature is sent down both branches
// weighted by the stored fractions, in training and in prediction.
struct TreeNode {
    bool leaf = true;
    std::vector<double> distribution;  // leaf only; Laplace-smoothed, sums to 1

    int feature = -1;  // split only
    double threshold = 0.0;
    double left_fraction = 0.5;  // known-weight share that went left
    double right_fraction = 0.5;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;

    int depth() const;
    std::size_t leaf_count() const;
};

struct Tree {
    std::unique_ptr<TreeNode> root;
    int feature_count = 0;
    int class_count = 0;
};

using SampleWeights = std::vector<double>;

// Weighted C4.5 training over a raw matrix. Thresholds are midpoints between
// adjacent observed values; the best split maximizes gain ratio (ties: higher
// gain, lower feature index, lower threshold). A node becomes a leaf when
// pure, when its weight drops below 2*min_leaf_weight, at max_depth, or when
// no threshold partitions the known values. Zero-weight samples are dropped
// up front and remaining weights are rescaled to sum to their count, so the
// tree is invariant to positive rescaling of the weight vector.
Tree train_tree(const std::vector<FeatureVector>& samples, const std::vector<int>& labels,
                int class_count, const SampleWeights& weights, const TrainControl& ctrl);

Tree train_tree(const LabeledDataset& ds, const SampleWeights& weights, const TrainControl& ctrl);

// Class-probability vector for x; sums to 1. SchemaMismatch if x has the
// wrong dimension.
std::vector<double> predict_proba_tree(const Tree& tree, const FeatureVector& x);

// Argmax of predict_proba_tree, ties to the lowest class index.
int predict_tree(const Tree& tree, const FeatureVector& x);

nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& doc);

}  // namespace opclass
