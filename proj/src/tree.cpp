#include "opclass/tree.hpp"

#include <algorithm>
#include <cmath>

namespace opclass {

int TreeNode::depth() const {
    if (leaf) return 0;
    return 1 + std::max(left->depth(), right->depth());
}

std::size_t TreeNode::leaf_count() const {
    if (leaf) return 1;
    return left->leaf_count() + right->leaf_count();
}

namespace {

struct Item {
    int index;
    double weight;
};

struct KnownValue {
    double value;
    int label;
    double weight;
};

double entropy(const std::vector<double>& class_weights, double total) {
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double w : class_weights) {
        if (w <= 0.0) continue;
        double p = w / total;
        h -= p * std::log2(p);
    }
    return h;
}

struct SplitChoice {
    bool found = false;
    double ratio = 0.0;
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    double left_fraction = 0.0;   // of known weight
    double right_fraction = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<FeatureVector>& samples, const std::vector<int>& labels,
                int class_count, const TrainControl& ctrl)
        : samples_(samples), labels_(labels), k_(class_count), ctrl_(ctrl) {
        // One sort per feature for the whole tree; nodes then gather their
        // members in value order with a linear walk instead of re-sorting.
        // Values are cached contiguously alongside the order so the walk does
        // not chase row pointers.
        const std::size_t feature_count = samples_[0].size();
        sorted_.resize(feature_count);
        sorted_values_.resize(feature_count);
        for (std::size_t f = 0; f < feature_count; ++f) {
            auto& order = sorted_[f];
            order.reserve(samples_.size());
            for (std::size_t i = 0; i < samples_.size(); ++i)
                if (!is_missing(samples_[i][f])) order.push_back(static_cast<int>(i));
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return samples_[static_cast<std::size_t>(a)][f] <
                       samples_[static_cast<std::size_t>(b)][f];
            });
            auto& values = sorted_values_[f];
            values.reserve(order.size());
            for (int index : order) values.push_back(samples_[static_cast<std::size_t>(index)][f]);
        }
        node_weight_.assign(samples_.size(), 0.0);
    }

    std::unique_ptr<TreeNode> build(std::vector<Item>& items, int depth) {
        std::vector<double> class_weights(static_cast<std::size_t>(k_), 0.0);
        double total = 0.0;
        for (const Item& it : items) {
            class_weights[static_cast<std::size_t>(labels_[it.index])] += it.weight;
            total += it.weight;
        }

        bool pure = false;
        for (double w : class_weights)
            if (w == total && total > 0.0) pure = true;

        if (pure || depth >= ctrl_.max_depth || total < 2.0 * ctrl_.min_leaf_weight)
            return make_leaf(class_weights, total);

        SplitChoice best = choose_split(items, total);
        if (!best.found) return make_leaf(class_weights, total);

        auto node = std::make_unique<TreeNode>();
        node->leaf = false;
        node->feature = best.feature;
        node->threshold = best.threshold;
        node->left_fraction = best.left_fraction;
        node->right_fraction = best.right_fraction;

        std::vector<Item> left_items;
        std::vector<Item> right_items;
        for (const Item& it : items) {
            double v = samples_[static_cast<std::size_t>(it.index)]
                               [static_cast<std::size_t>(best.feature)];
            if (is_missing(v)) {
                left_items.push_back({it.index, it.weight * best.left_fraction});
                right_items.push_back({it.index, it.weight * best.right_fraction});
            } else if (v <= best.threshold) {
                left_items.push_back(it);
            } else {
                right_items.push_back(it);
            }
        }
        items.clear();
        items.shrink_to_fit();

        node->left = build(left_items, depth + 1);
        node->right = build(right_items, depth + 1);
        return node;
    }

private:
    std::unique_ptr<TreeNode> make_leaf(const std::vector<double>& class_weights, double total) {
        auto node = std::make_unique<TreeNode>();
        node->leaf = true;
        node->distribution.resize(static_cast<std::size_t>(k_));
        double alpha = ctrl_.laplace_alpha;
        double denom = total + alpha * static_cast<double>(k_);
        for (int c = 0; c < k_; ++c) {
            double w = class_weights[static_cast<std::size_t>(c)];
            node->distribution[static_cast<std::size_t>(c)] =
                denom > 0.0 ? (w + alpha) / denom : 1.0 / static_cast<double>(k_);
        }
        return node;
    }

    // w * log2(w), 0 at w <= 0. The sweep maintains running sums of this over
    // the class weights on each side, so a boundary costs O(1) instead of a
    // per-class entropy loop.
    static double wlog(double w) { return w > 0.0 ? w * std::log2(w) : 0.0; }

    SplitChoice choose_split(const std::vector<Item>& items, double total) {
        SplitChoice best;
        const int feature_count = static_cast<int>(samples_[0].size());
        std::vector<double> left_class(static_cast<std::size_t>(k_));
        std::vector<double> right_class(static_cast<std::size_t>(k_));
        std::vector<double> known_class(static_cast<std::size_t>(k_));
        std::vector<double> left_wlog_c(static_cast<std::size_t>(k_));   // wlog(left_class[c])
        std::vector<double> right_wlog_c(static_cast<std::size_t>(k_));  // wlog(right_class[c])
        const double log2_total = std::log2(total);

        for (const Item& it : items) node_weight_[static_cast<std::size_t>(it.index)] = it.weight;

        for (int f = 0; f < feature_count; ++f) {
            known_.clear();
            std::fill(known_class.begin(), known_class.end(), 0.0);
            double known_weight = 0.0;
            const auto& order = sorted_[static_cast<std::size_t>(f)];
            const auto& values = sorted_values_[static_cast<std::size_t>(f)];
            for (std::size_t j = 0; j < order.size(); ++j) {
                int index = order[j];
                double w = node_weight_[static_cast<std::size_t>(index)];
                if (w <= 0.0) continue;
                known_.push_back({values[j], labels_[index], w});
                known_class[static_cast<std::size_t>(labels_[index])] += w;
                known_weight += w;
            }
            if (known_.size() < 2 || known_weight <= 0.0) continue;
            if (known_.front().value == known_.back().value) continue;  // constant feature

            double missing_weight = total - known_weight;
            double known_fraction = known_weight / total;
            double h_known = entropy(known_class, known_weight);
            double miss_term = 0.0;
            if (missing_weight > 0.0) {
                double p = missing_weight / total;
                miss_term = -p * std::log2(p);
            }

            std::fill(left_class.begin(), left_class.end(), 0.0);
            std::fill(left_wlog_c.begin(), left_wlog_c.end(), 0.0);
            std::copy(known_class.begin(), known_class.end(), right_class.begin());
            double left_weight = 0.0;
            double left_wlog = 0.0;   // sum over classes of wlog(left weight)
            double right_wlog = 0.0;  // same for the right side
            for (int c = 0; c < k_; ++c) {
                right_wlog_c[static_cast<std::size_t>(c)] =
                    wlog(known_class[static_cast<std::size_t>(c)]);
                right_wlog += right_wlog_c[static_cast<std::size_t>(c)];
            }

            std::size_t i = 0;
            while (i < known_.size()) {
                // consume one group of equal values
                double value = known_[i].value;
                while (i < known_.size() && known_[i].value == value) {
                    auto c = static_cast<std::size_t>(known_[i].label);
                    double w = known_[i].weight;
                    left_class[c] += w;
                    right_class[c] -= w;
                    double fl = wlog(left_class[c]);
                    double fr = wlog(right_class[c]);
                    left_wlog += fl - left_wlog_c[c];
                    right_wlog += fr - right_wlog_c[c];
                    left_wlog_c[c] = fl;
                    right_wlog_c[c] = fr;
                    left_weight += w;
                    ++i;
                }
                if (i == known_.size()) break;  // no boundary after the last group

                double right_weight = known_weight - left_weight;
                if (right_weight <= 0.0) break;  // remaining weight cancelled to round-off
                double log2_left = std::log2(left_weight);
                double log2_right = std::log2(right_weight);
                // weighted child entropies: W*H = W*log2(W) - sum_c wlog(w_c)
                double children = (left_weight * log2_left - left_wlog + right_weight * log2_right -
                                   right_wlog) /
                                  known_weight;
                double gain = known_fraction * (h_known - children);
                if (gain < 0.0) gain = 0.0;  // guards against log2 round-off

                double split_info = miss_term -
                                    (left_weight / total) * (log2_left - log2_total) -
                                    (right_weight / total) * (log2_right - log2_total);
                double ratio = gain / split_info;

                double threshold = 0.5 * (value + known_[i].value);
                bool better = false;
                if (!best.found) {
                    better = true;
                } else if (ratio != best.ratio) {
                    better = ratio > best.ratio;
                } else if (gain != best.gain) {
                    better = gain > best.gain;
                } else if (f != best.feature) {
                    better = f < best.feature;
                } else {
                    better = threshold < best.threshold;
                }
                if (better) {
                    best.found = true;
                    best.ratio = ratio;
                    best.gain = gain;
                    best.feature = f;
                    best.threshold = threshold;
                    best.left_fraction = left_weight / known_weight;
                    best.right_fraction = right_weight / known_weight;
                }
            }
        }

        for (const Item& it : items) node_weight_[static_cast<std::size_t>(it.index)] = 0.0;
        return best;
    }

    const std::vector<FeatureVector>& samples_;
    const std::vector<int>& labels_;
    const int k_;
    const TrainControl& ctrl_;
    std::vector<std::vector<int>> sorted_;          // per feature, ascending by value, NaN excluded
    std::vector<std::vector<double>> sorted_values_;  // values aligned with sorted_
    std::vector<double> node_weight_;                 // scratch membership map for choose_split
    std::vector<KnownValue> known_;
};

void validate_control(const TrainControl& ctrl) {
    if (ctrl.min_leaf_weight <= 0.0)
        throw_error(ErrorKind::BadConfig, "min_leaf_weight must be positive");
    if (ctrl.max_depth < 1) throw_error(ErrorKind::BadConfig, "max_depth must be >= 1");
    if (ctrl.laplace_alpha < 0.0) throw_error(ErrorKind::BadConfig, "laplace_alpha must be >= 0");
}

}  // namespace

Tree train_tree(const std::vector<FeatureVector>& samples, const std::vector<int>& labels,
                int class_count, const SampleWeights& weights, const TrainControl& ctrl) {
    validate_control(ctrl);
    if (samples.empty()) throw_error(ErrorKind::EmptyDataset, "no samples to train on");
    if (samples.size() != labels.size() || samples.size() != weights.size())
        throw_error(ErrorKind::LengthMismatch, "samples, labels and weights differ in length");
    if (class_count < 2) throw_error(ErrorKind::BadConfig, "training needs k >= 2 classes");

    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw_error(ErrorKind::BadConfig, "negative sample weight");
        sum += w;
    }
    if (sum <= 0.0) throw_error(ErrorKind::AllWeightsZero, "sample weights sum to zero");

    // Drop zero-weight samples and rescale the rest to sum to their count:
    // the tree (structure and leaf smoothing) then depends only on relative
    // weights.
    std::vector<Item> items;
    items.reserve(samples.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > 0.0) items.push_back({static_cast<int>(i), weights[i]});
    double scale = static_cast<double>(items.size()) / sum;
    for (Item& it : items) it.weight *= scale;

    Tree tree;
    tree.feature_count = static_cast<int>(samples[0].size());
    tree.class_count = class_count;
    TreeBuilder builder(samples, labels, class_count, ctrl);
    tree.root = builder.build(items, 0);
    return tree;
}

Tree train_tree(const LabeledDataset& ds, const SampleWeights& weights, const TrainControl& ctrl) {
    return train_tree(ds.samples, ds.labels, ds.class_count(), weights, ctrl);
}

namespace {

void predict_into(const TreeNode& node, const FeatureVector& x, double weight,
                  std::vector<double>& out) {
    if (node.leaf) {
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += weight * node.distribution[c];
        return;
    }
    double v = x[static_cast<std::size_t>(node.feature)];
    if (is_missing(v)) {
        predict_into(*node.left, x, weight * node.left_fraction, out);
        predict_into(*node.right, x, weight * node.right_fraction, out);
    } else if (v <= node.threshold) {
        predict_into(*node.left, x, weight, out);
    } else {
        predict_into(*node.right, x, weight, out);
    }
}

}  // namespace

std::vector<double> predict_proba_tree(const Tree& tree, const FeatureVector& x) {
    if (static_cast<int>(x.size()) != tree.feature_count)
        throw_error(ErrorKind::SchemaMismatch,
                    "input has " + std::to_string(x.size()) + " features, tree expects " +
                        std::to_string(tree.feature_count));
    std::vector<double> out(static_cast<std::size_t>(tree.class_count), 0.0);
    predict_into(*tree.root, x, 1.0, out);
    return out;
}

int predict_tree(const Tree& tree, const FeatureVector& x) {
    std::vector<double> proba = predict_proba_tree(tree, x);
    return static_cast<int>(std::max_element(proba.begin(), proba.end()) - proba.begin());
}

namespace {

nlohmann::json node_to_json(const TreeNode& node) {
    if (node.leaf) return {{"kind", "leaf"}, {"distribution", node.distribution}};
    return {{"kind", "split"},
            {"feature", node.feature},
            {"threshold", node.threshold},
            {"left_fraction", node.left_fraction},
            {"right_fraction", node.right_fraction},
            {"left", node_to_json(*node.left)},
            {"right", node_to_json(*node.right)}};
}

std::unique_ptr<TreeNode> node_from_json(const nlohmann::json& doc) {
    auto node = std::make_unique<TreeNode>();
    if (doc.at("kind") == "leaf") {
        node->leaf = true;
        node->distribution = doc.at("distribution").get<std::vector<double>>();
        return node;
    }
    node->leaf = false;
    node->feature = doc.at("feature").get<int>();
    node->threshold = doc.at("threshold").get<double>();
    node->left_fraction = doc.at("left_fraction").get<double>();
    node->right_fraction = doc.at("right_fraction").get<double>();
    node->left = node_from_json(doc.at("left"));
    node->right = node_from_json(doc.at("right"));
    return node;
}

}  // namespace

nlohmann::json tree_to_json(const Tree& tree) {
    return {{"feature_count", tree.feature_count},
            {"class_count", tree.class_count},
            {"root", node_to_json(*tree.root)}};
}

Tree tree_from_json(const nlohmann::json& doc) {
    Tree tree;
    tree.feature_count = doc.at("feature_count").get<int>();
    tree.class_count = doc.at("class_count").get<int>();
    tree.root = node_from_json(doc.at("root"));
    return tree;
}

}  // namespace opclass
