#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opclass/tree.hpp"

namespace opclass {

struct BoostRound {
    Tree tree;
    double epsilon = 0.0;  // weighted training error of the round
    double beta = 0.0;     // epsilon / (1 - epsilon), clamped to >= 1e-10
};

struct AdaBoostModel {
    FeatureSchema schema;
    std::vector<std::string> class_names;
    // Feature columns the trees were trained on, as indices into the schema.
    // Identity when no mask was applied.
    std::vector<int> selected_features;
    std::vector<BoostRound> rounds;

    int class_count() const { return static_cast<int>(class_names.size()); }
};

// Weighted misclassification mass: sum of D(i) over i with prediction != label.
double compute_error(const std::vector<int>& predictions, const std::vector<int>& labels,
                     const SampleWeights& weights);

// epsilon / (1 - epsilon). EpsilonOutOfRange at epsilon >= 0.5 (the boosting
// loop treats that as its stop signal); epsilon = 0 clamps to 1e-10 so the
// round weight ln(1/beta) stays finite.
double compute_beta(double epsilon);

// Correct samples' weights shrink by beta, wrong ones stay, then the vector
// renormalizes to sum 1. DegenerateDistribution if everything underflows.
SampleWeights update_weights(const SampleWeights& weights, double beta,
                             const std::vector<bool>& correct);

// The boosting loop over a raw matrix: up to T rounds, distribution starts
// uniform. A round with epsilon >= 0.5 is discarded and stops the loop
// (FirstRoundTooWeak if it is round 1); epsilon = 0 keeps the round with a
// clamped beta and stops.
std::vector<BoostRound> boost_rounds(const std::vector<FeatureVector>& samples,
                                     const std::vector<int>& labels, int class_count, int rounds,
                                     const TrainControl& ctrl);

// Dataset-level wrapper. `seed` is accepted for interface stability; the
// C4.5 weak learner is deterministic, so it is currently unused.
AdaBoostModel run_boosting(const LabeledDataset& ds, int rounds, const TrainControl& ctrl,
                           std::uint64_t seed = 0);

// Round-level forms, operating in the (possibly masked) tree feature space.
int rounds_vote(const std::vector<BoostRound>& rounds, const FeatureVector& x, int class_count);
std::vector<double> rounds_proba(const std::vector<BoostRound>& rounds, const FeatureVector& x,
                                 int class_count);

// Strong hypothesis: every round votes its tree's argmax class with weight
// ln(1/beta_t); ties resolve to the lowest class index.
int predict(const AdaBoostModel& model, const FeatureVector& x);

// Strong score: convex combination of the round trees' probability vectors
// with weights (1 - eps_t) / sum_s (1 - eps_s).
std::vector<double> predict_proba(const AdaBoostModel& model, const FeatureVector& x);

nlohmann::json model_to_json(const AdaBoostModel& model);
AdaBoostModel model_from_json(const nlohmann::json& doc);
void save_model(const AdaBoostModel& model, const std::string& path);
AdaBoostModel load_model(const std::string& path);

}  // namespace opclass
