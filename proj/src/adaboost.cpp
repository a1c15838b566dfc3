#include "opclass/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace opclass {

double compute_error(const std::vector<int>& predictions, const std::vector<int>& labels,
                     const SampleWeights& weights) {
    if (predictions.size() != labels.size() || predictions.size() != weights.size())
        throw_error(ErrorKind::LengthMismatch, "predictions, labels and weights differ in length");
    double err = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (predictions[i] != labels[i]) err += weights[i];
    return err;
}

double compute_beta(double epsilon) {
    if (epsilon < 0.0) throw_error(ErrorKind::BadConfig, "negative error rate");
    if (epsilon >= 0.5)
        throw_error(ErrorKind::EpsilonOutOfRange,
                    "error rate " + std::to_string(epsilon) + " is >= 0.5");
    double beta = epsilon / (1.0 - epsilon);
    return std::max(beta, 1e-10);
}

SampleWeights update_weights(const SampleWeights& weights, double beta,
                             const std::vector<bool>& correct) {
    if (weights.size() != correct.size())
        throw_error(ErrorKind::LengthMismatch, "weights and correctness mask differ in length");
    if (beta <= 0.0 || beta > 1.0) throw_error(ErrorKind::BadConfig, "beta must be in (0, 1]");

    SampleWeights next(weights.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        next[i] = correct[i] ? weights[i] * beta : weights[i];
        sum += next[i];
    }
    if (sum <= 0.0)
        throw_error(ErrorKind::DegenerateDistribution, "all sample weights underflowed to zero");
    for (double& w : next) w /= sum;
    return next;
}

std::vector<BoostRound> boost_rounds(const std::vector<FeatureVector>& samples,
                                     const std::vector<int>& labels, int class_count, int rounds,
                                     const TrainControl& ctrl) {
    if (rounds < 1) throw_error(ErrorKind::BadConfig, "boosting needs at least one round");
    const std::size_t m = samples.size();
    if (m == 0) throw_error(ErrorKind::EmptyDataset, "no samples to boost on");

    SampleWeights dist(m, 1.0 / static_cast<double>(m));
    std::vector<BoostRound> kept;

    for (int t = 0; t < rounds; ++t) {
        Tree tree = train_tree(samples, labels, class_count, dist, ctrl);

        std::vector<int> predictions(m);
        std::vector<bool> correct(m);
        for (std::size_t i = 0; i < m; ++i) {
            predictions[i] = predict_tree(tree, samples[i]);
            correct[i] = predictions[i] == labels[i];
        }
        double epsilon = compute_error(predictions, labels, dist);

        if (epsilon >= 0.5) {
            if (kept.empty())
                throw_error(ErrorKind::FirstRoundTooWeak,
                            "round 1 error rate " + std::to_string(epsilon) + " is >= 0.5");
            break;  // discard this round, keep the model so far
        }

        double beta = compute_beta(epsilon);
        kept.push_back(BoostRound{std::move(tree), epsilon, beta});

        if (epsilon == 0.0) break;  // distribution would degenerate
        dist = update_weights(dist, beta, correct);
    }
    return kept;
}

AdaBoostModel run_boosting(const LabeledDataset& ds, int rounds, const TrainControl& ctrl,
                           std::uint64_t /*seed*/) {
    AdaBoostModel model;
    model.schema = ds.schema;
    model.class_names = ds.class_names;
    model.selected_features.resize(ds.schema.size());
    std::iota(model.selected_features.begin(), model.selected_features.end(), 0);
    model.rounds = boost_rounds(ds.samples, ds.labels, ds.class_count(), rounds, ctrl);
    return model;
}

namespace {

FeatureVector project(const AdaBoostModel& model, const FeatureVector& x) {
    if (x.size() != model.schema.size())
        throw_error(ErrorKind::SchemaMismatch,
                    "input has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(model.schema.size()));
    FeatureVector out;
    out.reserve(model.selected_features.size());
    for (int f : model.selected_features) out.push_back(x[static_cast<std::size_t>(f)]);
    return out;
}

}  // namespace

int rounds_vote(const std::vector<BoostRound>& rounds, const FeatureVector& x, int class_count) {
    std::vector<double> votes(static_cast<std::size_t>(class_count), 0.0);
    for (const BoostRound& round : rounds) {
        int c = predict_tree(round.tree, x);
        votes[static_cast<std::size_t>(c)] += std::log(1.0 / round.beta);
    }
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

std::vector<double> rounds_proba(const std::vector<BoostRound>& rounds, const FeatureVector& x,
                                 int class_count) {
    double total = 0.0;
    for (const BoostRound& round : rounds) total += 1.0 - round.epsilon;
    std::vector<double> out(static_cast<std::size_t>(class_count), 0.0);
    for (const BoostRound& round : rounds) {
        std::vector<double> weak = predict_proba_tree(round.tree, x);
        double w = (1.0 - round.epsilon) / total;
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * weak[c];
    }
    return out;
}

int predict(const AdaBoostModel& model, const FeatureVector& x) {
    return rounds_vote(model.rounds, project(model, x), model.class_count());
}

std::vector<double> predict_proba(const AdaBoostModel& model, const FeatureVector& x) {
    return rounds_proba(model.rounds, project(model, x), model.class_count());
}

nlohmann::json model_to_json(const AdaBoostModel& model) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const BoostRound& round : model.rounds)
        rounds.push_back({{"epsilon", round.epsilon},
                          {"beta", round.beta},
                          {"tree", tree_to_json(round.tree)}});
    return {{"format", "opclass-model"},
            {"version", 1},
            {"schema",
             {{"name", schema_kind_name(model.schema.name)},
              {"version", model.schema.version},
              {"feature_names", model.schema.feature_names}}},
            {"class_names", model.class_names},
            {"selected_features", model.selected_features},
            {"rounds", rounds}};
}

AdaBoostModel model_from_json(const nlohmann::json& doc) {
    if (doc.value("format", "") != "opclass-model")
        throw_error(ErrorKind::CorpusFormat, "not an opclass model document");
    AdaBoostModel model;
    const auto& schema = doc.at("schema");
    std::string kind = schema.at("name").get<std::string>();
    if (kind == schema_kind_name(SchemaKind::Code0Day)) {
        model.schema.name = SchemaKind::Code0Day;
    } else if (kind == schema_kind_name(SchemaKind::Full)) {
        model.schema.name = SchemaKind::Full;
    } else if (kind == schema_kind_name(SchemaKind::Custom)) {
        model.schema.name = SchemaKind::Custom;
    } else {
        throw_error(ErrorKind::CorpusFormat, "unknown schema kind '" + kind + "'");
    }
    model.schema.version = schema.at("version").get<int>();
    model.schema.feature_names = schema.at("feature_names").get<std::vector<std::string>>();
    model.class_names = doc.at("class_names").get<std::vector<std::string>>();
    model.selected_features = doc.at("selected_features").get<std::vector<int>>();
    for (const auto& jr : doc.at("rounds")) {
        BoostRound round;
        round.epsilon = jr.at("epsilon").get<double>();
        round.beta = jr.at("beta").get<double>();
        round.tree = tree_from_json(jr.at("tree"));
        model.rounds.push_back(std::move(round));
    }
    return model;
}

void save_model(const AdaBoostModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_error(ErrorKind::IoError, "cannot write " + path);
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw_error(ErrorKind::IoError, "write to " + path + " failed");
}

AdaBoostModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(ErrorKind::IoError, "cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw_error(ErrorKind::CorpusFormat, std::string("bad model JSON: ") + e.what());
    }
    return model_from_json(doc);
}

}  // namespace opclass
