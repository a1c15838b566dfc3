#include "opclass/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace opclass {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t sum = 0;
    for (const auto& row : counts)
        for (std::int64_t c : row) sum += c;
    return sum;
}

std::vector<std::pair<int, int>> canonical_pairs(int k) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
    return pairs;
}

double pairwise_auc(const std::vector<std::vector<double>>& scores, const std::vector<int>& labels,
                    int class_a, int class_b) {
    if (scores.size() != labels.size())
        throw_error(ErrorKind::LengthMismatch, "scores and labels differ in length");

    // margin, is_class_a
    std::vector<std::pair<double, bool>> margins;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != class_a && labels[i] != class_b) continue;
        double margin = scores[i][static_cast<std::size_t>(class_a)] -
                        scores[i][static_cast<std::size_t>(class_b)];
        margins.emplace_back(margin, labels[i] == class_a);
    }

    std::size_t na = 0;
    for (const auto& m : margins) na += m.second ? 1 : 0;
    std::size_t nb = margins.size() - na;
    if (na == 0)
        throw_error(ErrorKind::MissingClass, "no samples of class " + std::to_string(class_a));
    if (nb == 0)
        throw_error(ErrorKind::MissingClass, "no samples of class " + std::to_string(class_b));

    std::sort(margins.begin(), margins.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    // Rank sum of class-a samples with average ranks over tie groups.
    double rank_sum_a = 0.0;
    std::size_t i = 0;
    while (i < margins.size()) {
        std::size_t j = i;
        while (j < margins.size() && margins[j].first == margins[i].first) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t t = i; t < j; ++t)
            if (margins[t].second) rank_sum_a += avg_rank;
        i = j;
    }

    double u = rank_sum_a - 0.5 * static_cast<double>(na) * static_cast<double>(na + 1);
    return u / (static_cast<double>(na) * static_cast<double>(nb));
}

std::vector<std::pair<double, double>> roc_points(const std::vector<std::vector<double>>& scores,
                                                  const std::vector<int>& labels, int class_a,
                                                  int class_b) {
    std::vector<std::pair<double, bool>> margins;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != class_a && labels[i] != class_b) continue;
        margins.emplace_back(scores[i][static_cast<std::size_t>(class_a)] -
                                 scores[i][static_cast<std::size_t>(class_b)],
                             labels[i] == class_a);
    }
    std::size_t positives = 0;
    for (const auto& m : margins) positives += m.second ? 1 : 0;
    std::size_t negatives = margins.size() - positives;
    if (positives == 0 || negatives == 0)
        throw_error(ErrorKind::MissingClass, "ROC needs samples of both classes");

    std::sort(margins.begin(), margins.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });

    std::vector<std::pair<double, double>> points{{0.0, 0.0}};
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t i = 0;
    while (i < margins.size()) {
        std::size_t j = i;
        while (j < margins.size() && margins[j].first == margins[i].first) {
            (margins[j].second ? tp : fp) += 1;
            ++j;
        }
        points.emplace_back(static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives));
        i = j;
    }
    return points;
}

PairwiseAucSet pairwise_auc_set(const std::vector<std::vector<double>>& scores,
                                const std::vector<int>& labels, int k) {
    PairwiseAucSet out;
    for (const auto& [a, b] : canonical_pairs(k)) out.push_back(pairwise_auc(scores, labels, a, b));
    return out;
}

double auc_area(const PairwiseAucSet& aucs) {
    if (aucs.empty()) throw_error(ErrorKind::EmptySet, "no pairwise AUC values");
    const std::size_t q = aucs.size();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < q; ++i) sum += aucs[i] * aucs[i + 1];
    sum += aucs[q - 1] * aucs[0];
    return sum / static_cast<double>(q);
}

EvalReport evaluate_counts(const std::vector<int>& predictions, const std::vector<int>& labels,
                           int k) {
    if (k < 2) throw_error(ErrorKind::BadConfig, "evaluation needs k >= 2 classes");
    if (predictions.size() != labels.size())
        throw_error(ErrorKind::LengthMismatch, "predictions and labels differ in length");

    EvalReport report;
    report.auc_area = std::numeric_limits<double>::quiet_NaN();
    report.confusion.counts.assign(static_cast<std::size_t>(k),
                                   std::vector<std::int64_t>(static_cast<std::size_t>(k), 0));
    for (std::size_t i = 0; i < labels.size(); ++i)
        report.confusion.counts[static_cast<std::size_t>(predictions[i])]
                              [static_cast<std::size_t>(labels[i])] += 1;

    std::int64_t total = report.confusion.total();
    std::int64_t tp = 0;  // pooled over classes = diagonal
    for (int c = 0; c < k; ++c) tp += report.confusion.counts[c][c];
    report.accuracy = total == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(total);

    std::int64_t fp = 0;
    std::int64_t fn = 0;
    report.per_class_accuracy.resize(static_cast<std::size_t>(k), 0.0);
    for (int c = 0; c < k; ++c) {
        std::int64_t row = 0;
        std::int64_t col = 0;
        for (int j = 0; j < k; ++j) {
            row += report.confusion.counts[c][j];
            col += report.confusion.counts[j][c];
        }
        fp += row - report.confusion.counts[c][c];
        fn += col - report.confusion.counts[c][c];
        report.per_class_accuracy[static_cast<std::size_t>(c)] =
            col == 0 ? 0.0
                     : static_cast<double>(report.confusion.counts[c][c]) / static_cast<double>(col);
    }
    double denom = static_cast<double>(2 * tp + fp + fn);
    report.micro_f1 = denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
    return report;
}

EvalReport evaluate(const std::vector<std::vector<double>>& scores,
                    const std::vector<int>& predictions, const std::vector<int>& labels, int k) {
    if (scores.size() != labels.size())
        throw_error(ErrorKind::LengthMismatch, "scores and labels differ in length");
    EvalReport report = evaluate_counts(predictions, labels, k);
    report.pairwise_aucs = pairwise_auc_set(scores, labels, k);
    report.auc_area = opclass::auc_area(report.pairwise_aucs);
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string eval_csv_header(const std::vector<std::string>& class_names) {
    std::string out = "algorithm,auc_area,micro_f1,accuracy";
    for (const std::string& name : class_names) out += ",accuracy_" + name;
    return out;
}

std::string eval_csv_row(const EvalReport& report, const std::string& algorithm) {
    std::string out = algorithm;
    out += ',' + fmt(report.auc_area);
    out += ',' + fmt(report.micro_f1);
    out += ',' + fmt(report.accuracy);
    for (double acc : report.per_class_accuracy) out += ',' + fmt(acc);
    return out;
}

}  // namespace opclass
