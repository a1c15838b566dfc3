#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "opclass/errors.hpp"

namespace opclass {

// Rows are predicted classes, columns actual classes.
struct ConfusionMatrix {
    std::vector<std::vector<std::int64_t>> counts;

    int k() const { return static_cast<int>(counts.size()); }
    std::int64_t total() const;
};

// One-vs-one AUC values r_1..r_q in canonical pair order
// (0,1),(0,2),...,(0,k-1),(1,2),...,(k-2,k-1). The ring metric below depends
// on neighbor order, so this ordering is part of the metric's definition.
using PairwiseAucSet = std::vector<double>;

std::vector<std::pair<int, int>> canonical_pairs(int k);

// Mann-Whitney AUC of class_a against class_b, ranking samples of the two
// classes by the score margin s[class_a] - s[class_b]; ties count 0.5.
// MissingClass when either class has no samples.
double pairwise_auc(const std::vector<std::vector<double>>& scores, const std::vector<int>& labels,
                    int class_a, int class_b);

// (FPR, TPR) points of the one-vs-one ROC curve over descending margin
// thresholds, starting at (0,0) and ending at (1,1). Tied margins collapse
// into one step.
std::vector<std::pair<double, double>> roc_points(const std::vector<std::vector<double>>& scores,
                                                  const std::vector<int>& labels, int class_a,
                                                  int class_b);

// All C(k,2) pairwise AUCs in canonical order.
PairwiseAucSet pairwise_auc_set(const std::vector<std::vector<double>>& scores,
                                const std::vector<int>& labels, int k);

// Normalized polar area over the AUC ring:
//   (1/q) * (sum_{i=1}^{q-1} r_i*r_{i+1} + r_q*r_1)
// q = 1 degenerates to r_1^2. EmptySet when q = 0.
double auc_area(const PairwiseAucSet& aucs);

struct EvalReport {
    double auc_area = 0.0;
    double micro_f1 = 0.0;
    double accuracy = 0.0;
    std::vector<double> per_class_accuracy;  // recall per class
    ConfusionMatrix confusion;
    PairwiseAucSet pairwise_aucs;
};

// Confusion-matrix metrics only; auc_area is left NaN and the pairwise set
// empty. Used where an AUC ring is undefined (a test split missing a class).
EvalReport evaluate_counts(const std::vector<int>& predictions, const std::vector<int>& labels,
                           int k);

// Fills every report field. Predictions drive the confusion matrix and
// accuracy; scores drive the AUC ring. Micro-F1 pools TP/FP/FN over classes.
EvalReport evaluate(const std::vector<std::vector<double>>& scores,
                    const std::vector<int>& predictions, const std::vector<int>& labels, int k);

// Flat experiment-table row: algorithm, AUC_area, Micro-F1, overall accuracy,
// then one accuracy column per category.
std::string eval_csv_header(const std::vector<std::string>& class_names);
std::string eval_csv_row(const EvalReport& report, const std::string& algorithm);

}  // namespace opclass
