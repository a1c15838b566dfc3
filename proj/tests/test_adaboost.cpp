#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opclass/adaboost.hpp"
#include "opclass/rng.hpp"
#include "support/helpers.hpp"

using namespace opclass;
using testsupport::error_kind_of;
using testsupport::TempDir;

namespace {

LabeledDataset separable_dataset(int per_class, std::uint64_t seed) {
    LabeledDataset ds;
    ds.schema = custom_schema({"f0", "f1"});
    ds.class_names = {"a", "b", "c"};
    Rng rng(seed);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < per_class; ++i) {
            ds.samples.push_back({c * 10.0 + rng.uniform(), rng.uniform()});
            ds.labels.push_back(c);
        }
    return ds;
}

LabeledDataset xor_dataset() {
    LabeledDataset ds;
    ds.schema = custom_schema({"f0", "f1"});
    ds.class_names = {"even", "odd"};
    for (int copy = 0; copy < 2; ++copy)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                ds.samples.push_back({static_cast<double>(a), static_cast<double>(b)});
                ds.labels.push_back(a ^ b);
            }
    return ds;
}

}  // namespace

TEST_CASE("compute_error sums the weight of misclassified samples") {
    CHECK(compute_error({0, 1, 0, 1}, {0, 0, 0, 1}, {0.25, 0.25, 0.25, 0.25}) ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK(compute_error({1, 1}, {1, 1}, {0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(compute_error({0, 0, 1}, {0, 0, 0}, {0.5, 0.2, 0.3}) ==
          doctest::Approx(0.3).epsilon(1e-12));
    CHECK(error_kind_of([] { compute_error({0}, {0, 1}, {1.0, 0.0}); }) ==
          ErrorKind::LengthMismatch);
}

TEST_CASE("compute_beta maps error to odds") {
    CHECK(compute_beta(0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(compute_beta(0.4) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(compute_beta(0.0) == doctest::Approx(1e-10));  // clamped
    CHECK(error_kind_of([] { compute_beta(0.5); }) == ErrorKind::EpsilonOutOfRange);
    CHECK(error_kind_of([] { compute_beta(0.7); }) == ErrorKind::EpsilonOutOfRange);
}

TEST_CASE("update_weights shrinks correct samples and renormalizes") {
    SampleWeights next =
        update_weights({0.25, 0.25, 0.25, 0.25}, 1.0 / 3.0, {false, true, true, true});
    CHECK(next[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(next[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(next[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(next[3] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("update_weights with beta one is the identity") {
    SampleWeights w = {0.1, 0.2, 0.3, 0.4};
    SampleWeights next = update_weights(w, 1.0, {true, false, true, false});
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(next[i] == doctest::Approx(w[i]));
}

TEST_CASE("all-correct rounds leave a uniform distribution uniform") {
    SampleWeights next = update_weights({0.25, 0.25, 0.25, 0.25}, 0.2, {true, true, true, true});
    for (double w : next) CHECK(w == doctest::Approx(0.25));
}

TEST_CASE("misclassified weight share never shrinks after an update") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 2 + rng.below(20);
        SampleWeights w(n);
        double sum = 0.0;
        for (double& v : w) {
            v = rng.uniform() + 1e-3;
            sum += v;
        }
        for (double& v : w) v /= sum;
        std::vector<bool> correct(n);
        bool any_wrong = false;
        for (std::size_t i = 0; i < n; ++i) {
            correct[i] = rng.below(3) != 0;
            any_wrong = any_wrong || !correct[i];
        }
        if (!any_wrong) correct[0] = false;
        double beta = 0.05 + 0.9 * rng.uniform();

        double wrong_before = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!correct[i]) wrong_before += w[i];
        SampleWeights next = update_weights(w, beta, correct);
        double wrong_after = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!correct[i]) wrong_after += next[i];
        CHECK(wrong_after >= wrong_before - 1e-12);
    }
}

TEST_CASE("a separable set stops at round one with zero error") {
    LabeledDataset ds = separable_dataset(10, 31);
    AdaBoostModel model = run_boosting(ds, 5, TrainControl{}, 0);
    REQUIRE(model.rounds.size() == 1);
    CHECK(model.rounds[0].epsilon == 0.0);
    CHECK(model.rounds[0].beta == doctest::Approx(1e-10));
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(predict(model, ds.samples[i]) == ds.labels[i]);
}

TEST_CASE("depth-capped xor fails the first round") {
    LabeledDataset ds = xor_dataset();
    TrainControl stump;
    stump.max_depth = 1;
    CHECK(error_kind_of([&] { run_boosting(ds, 5, stump, 0); }) == ErrorKind::FirstRoundTooWeak);
}

TEST_CASE("one round equals a single weighted tree") {
    LabeledDataset ds = separable_dataset(6, 32);
    AdaBoostModel model = run_boosting(ds, 1, TrainControl{}, 0);
    SampleWeights uniform(ds.size(), 1.0 / static_cast<double>(ds.size()));
    Tree tree = train_tree(ds, uniform, TrainControl{});
    CHECK(model.rounds.size() == 1);
    CHECK(tree_to_json(model.rounds[0].tree) == tree_to_json(tree));
}

TEST_CASE("vote weights follow ln(1/beta)") {
    // two rounds voting class 0 at beta 1/3 and 1/2 lose to one round voting
    // class 1 at beta 1/9: 1.0986 + 0.6931 < 2.1972
    auto leaf_tree = [&](int cls) {
        Tree t;
        t.feature_count = 2;
        t.class_count = 2;
        t.root = std::make_unique<TreeNode>();
        t.root->distribution = cls == 0 ? std::vector<double>{0.9, 0.1}
                                        : std::vector<double>{0.1, 0.9};
        return t;
    };
    AdaBoostModel rigged;
    rigged.schema = custom_schema({"f0", "f1"});
    rigged.class_names = {"a", "b"};
    rigged.selected_features = {0, 1};
    rigged.rounds.push_back(BoostRound{leaf_tree(0), 0.25, 1.0 / 3.0});
    rigged.rounds.push_back(BoostRound{leaf_tree(0), 1.0 / 3.0, 0.5});
    rigged.rounds.push_back(BoostRound{leaf_tree(1), 0.1, 1.0 / 9.0});
    CHECK(predict(rigged, {0.0, 0.0}) == 1);
}

TEST_CASE("strong scores average weak scores by one minus epsilon") {
    auto leaf_tree = [&](std::vector<double> dist) {
        Tree t;
        t.feature_count = 1;
        t.class_count = 2;
        t.root = std::make_unique<TreeNode>();
        t.root->distribution = std::move(dist);
        return t;
    };
    AdaBoostModel model;
    model.schema = custom_schema({"f0"});
    model.class_names = {"a", "b"};
    model.selected_features = {0};
    model.rounds.push_back(BoostRound{leaf_tree({1.0, 0.0}), 0.2, compute_beta(0.2)});
    model.rounds.push_back(BoostRound{leaf_tree({0.0, 1.0}), 0.4, compute_beta(0.4)});

    std::vector<double> score = predict_proba(model, {0.0});
    CHECK(score[0] == doctest::Approx(0.8 / 1.4).epsilon(1e-12));
    CHECK(score[1] == doctest::Approx(0.6 / 1.4).epsilon(1e-12));
}

TEST_CASE("single-round scores equal the tree's probabilities") {
    LabeledDataset ds = separable_dataset(5, 34);
    AdaBoostModel model = run_boosting(ds, 1, TrainControl{}, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::vector<double> strong = predict_proba(model, ds.samples[i]);
        std::vector<double> weak = predict_proba_tree(model.rounds[0].tree, ds.samples[i]);
        for (std::size_t c = 0; c < strong.size(); ++c)
            CHECK(strong[c] == doctest::Approx(weak[c]).epsilon(1e-12));
    }
}

TEST_CASE("strong scores are proper distributions with no exact zeros") {
    Rng rng(35);
    LabeledDataset ds;
    ds.schema = custom_schema({"f0", "f1", "f2"});
    ds.class_names = {"a", "b", "c"};
    for (int i = 0; i < 150; ++i) {
        int c = static_cast<int>(rng.below(3));
        ds.samples.push_back(
            {c * 1.5 + rng.uniform(), rng.uniform() * 2.0, rng.below(7) == 0 ? missing_value()
                                                                             : rng.uniform()});
        ds.labels.push_back(c);
    }
    TrainControl weak;
    weak.max_depth = 3;
    AdaBoostModel model = run_boosting(ds, 10, weak, 0);
    CHECK(model.rounds.size() >= 1);
    for (int trial = 0; trial < 50; ++trial) {
        FeatureVector x = {rng.uniform(-1.0, 4.0), rng.uniform(-1.0, 3.0), rng.uniform()};
        std::vector<double> p = predict_proba(model, x);
        double sum = 0.0;
        for (double v : p) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("duplicating every round leaves predictions unchanged") {
    Rng rng(36);
    LabeledDataset ds;
    ds.schema = custom_schema({"f0", "f1"});
    ds.class_names = {"a", "b"};
    for (int i = 0; i < 80; ++i) {
        int c = static_cast<int>(rng.below(2));
        ds.samples.push_back({c + rng.uniform() * 1.6, rng.uniform()});
        ds.labels.push_back(c);
    }
    TrainControl weak;
    weak.max_depth = 2;
    AdaBoostModel model = run_boosting(ds, 8, weak, 0);

    AdaBoostModel doubled;
    doubled.schema = model.schema;
    doubled.class_names = model.class_names;
    doubled.selected_features = model.selected_features;
    for (int copy = 0; copy < 2; ++copy)
        for (const BoostRound& round : model.rounds)
            doubled.rounds.push_back(
                BoostRound{tree_from_json(tree_to_json(round.tree)), round.epsilon, round.beta});

    for (int trial = 0; trial < 60; ++trial) {
        FeatureVector x = {rng.uniform(-0.5, 2.5), rng.uniform()};
        CHECK(predict(model, x) == predict(doubled, x));
        std::vector<double> a = predict_proba(model, x);
        std::vector<double> b = predict_proba(doubled, x);
        for (std::size_t c = 0; c < a.size(); ++c) CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-12));
    }
}

TEST_CASE("training error is non-increasing over rounds on a boostable fixture") {
    Rng rng(37);
    LabeledDataset ds;
    ds.schema = custom_schema({"f0", "f1"});
    ds.class_names = {"a", "b"};
    for (int i = 0; i < 200; ++i) {
        double x = rng.uniform(-1.0, 1.0);
        double y = rng.uniform(-1.0, 1.0);
        ds.samples.push_back({x, y});
        ds.labels.push_back(x + y / 3.0 > 0.0 ? 1 : 0);
    }
    TrainControl weak;
    weak.max_depth = 1;  // stumps stay weak, every round has 0 < eps < 0.5
    AdaBoostModel model = run_boosting(ds, 12, weak, 0);
    REQUIRE(model.rounds.size() >= 2);

    double previous = 1.0;
    for (std::size_t t = 1; t <= model.rounds.size(); ++t) {
        AdaBoostModel prefix;
        prefix.schema = ds.schema;
        prefix.class_names = ds.class_names;
        prefix.selected_features = {0, 1};
        for (std::size_t s = 0; s < t; ++s)
            prefix.rounds.push_back(BoostRound{tree_from_json(tree_to_json(model.rounds[s].tree)),
                                               model.rounds[s].epsilon, model.rounds[s].beta});
        int wrong = 0;
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (predict(prefix, ds.samples[i]) != ds.labels[i]) ++wrong;
        double err = static_cast<double>(wrong) / static_cast<double>(ds.size());
        CHECK(err <= previous + 1e-12);
        previous = err;
    }
}

TEST_CASE("models round-trip through json files") {
    TempDir dir;
    LabeledDataset ds = separable_dataset(8, 38);
    AdaBoostModel model = run_boosting(ds, 3, TrainControl{}, 0);
    std::string path = dir.file("model.json");
    save_model(model, path);
    AdaBoostModel restored = load_model(path);
    CHECK(model_to_json(restored) == model_to_json(model));
    CHECK(restored.schema.feature_names == model.schema.feature_names);
    for (std::size_t i = 0; i < ds.size(); ++i)
        CHECK(predict(restored, ds.samples[i]) == predict(model, ds.samples[i]));
}

TEST_CASE("prediction rejects wrong dimensions") {
    LabeledDataset ds = separable_dataset(4, 39);
    AdaBoostModel model = run_boosting(ds, 1, TrainControl{}, 0);
    CHECK(error_kind_of([&] { predict(model, {1.0}); }) == ErrorKind::SchemaMismatch);
    CHECK(error_kind_of([&] { predict_proba(model, {1.0, 2.0, 3.0}); }) ==
          ErrorKind::SchemaMismatch);
}
