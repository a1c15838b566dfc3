#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opclass/bpso.hpp"
#include "opclass/synth.hpp"
#include "support/helpers.hpp"

using namespace opclass;
using testsupport::error_kind_of;

namespace {

LabeledDataset separable_dataset(int per_class, std::uint64_t seed) {
    LabeledDataset ds;
    ds.schema = custom_schema({"f0", "f1", "f2"});
    ds.class_names = {"a", "b", "c"};
    Rng rng(seed);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < per_class; ++i) {
            ds.samples.push_back({c * 10.0 + rng.uniform(), rng.uniform(), rng.uniform()});
            ds.labels.push_back(c);
        }
    return ds;
}

LabeledDataset noise_dataset(int n, std::uint64_t seed) {
    LabeledDataset ds;
    ds.schema = custom_schema({"f0", "f1", "f2", "f3"});
    ds.class_names = {"a", "b"};
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        ds.samples.push_back({rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
        ds.labels.push_back(static_cast<int>(rng.below(2)));
    }
    return ds;
}

BpsoConfig small_config(std::uint64_t seed) {
    BpsoConfig cfg;
    cfg.swarm_size = 4;
    cfg.generation_limit = 3;
    cfg.boosting_rounds = 3;
    cfg.inner_folds = 2;
    cfg.seed = seed;
    cfg.tree.max_depth = 3;
    return cfg;
}

}  // namespace

TEST_CASE("a single feature is always selected after repair") {
    BpsoConfig cfg;
    cfg.swarm_size = 20;
    cfg.seed = 5;
    for (const Particle& p : bpso::init_swarm(1, cfg)) {
        REQUIRE(p.position.size() == 1);
        CHECK(p.position[0] == 1);
    }
}

TEST_CASE("swarm initialization is seed-deterministic") {
    BpsoConfig cfg;
    cfg.swarm_size = 30;
    cfg.seed = 9;
    auto a = bpso::init_swarm(62, cfg);
    auto b = bpso::init_swarm(62, cfg);
    REQUIRE(a.size() == 30);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].position == b[i].position);
        CHECK(a[i].velocity == b[i].velocity);
        CHECK(a[i].position.size() == 62);
        CHECK(mask_popcount(a[i].position) >= 1);
        for (double v : a[i].velocity) {
            CHECK(v >= -cfg.v_max);
            CHECK(v <= cfg.v_max);
        }
    }
    cfg.seed = 10;
    auto c = bpso::init_swarm(62, cfg);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].position != c[i].position) any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("velocity vanishes when the particle sits on both bests with zero inertia") {
    BpsoConfig cfg;
    cfg.inertia = 0.0;
    Particle p;
    p.position = {1, 0, 1};
    p.best_position = p.position;
    p.velocity = {3.0, -2.0, 1.0};
    Rng rng(1);
    Particle next = bpso::step(p, p.position, cfg, rng);
    for (double v : next.velocity) CHECK(v == 0.0);
}

TEST_CASE("zero velocity sets bits with probability one half") {
    BpsoConfig cfg;
    cfg.inertia = 0.0;
    std::size_t n = 4000;
    Particle p;
    p.position.assign(n, 1);
    p.best_position = p.position;
    p.velocity.assign(n, 0.0);
    Rng rng(2);
    Particle next = bpso::step(p, p.position, cfg, rng);
    double rate = static_cast<double>(mask_popcount(next.position)) / static_cast<double>(n);
    CHECK(rate > 0.45);
    CHECK(rate < 0.55);
}

TEST_CASE("clamped positive velocity saturates near sigmoid of v_max") {
    // sigmoid(6) = 0.99752...; drive every component to the +v_max clamp
    BpsoConfig cfg;
    cfg.inertia = 1.0;
    std::size_t n = 4000;
    Particle p;
    p.position.assign(n, 1);
    p.best_position = p.position;
    p.velocity.assign(n, 100.0);  // clamps to +6
    Rng rng(3);
    Particle next = bpso::step(p, p.position, cfg, rng);
    for (double v : next.velocity) CHECK(v == cfg.v_max);
    double rate = static_cast<double>(mask_popcount(next.position)) / static_cast<double>(n);
    CHECK(rate > 0.985);
    CHECK(rate == doctest::Approx(1.0 / (1.0 + std::exp(-6.0))).epsilon(0.01));
}

TEST_CASE("larger velocities never lower the set-bit rate") {
    BpsoConfig cfg;
    cfg.inertia = 1.0;
    std::size_t n = 3000;
    double previous_rate = 0.0;
    for (double v : {-2.0, 0.0, 2.0}) {
        Particle p;
        p.position.assign(n, 0);
        p.best_position = p.position;
        p.velocity.assign(n, v);
        Rng rng(4);
        Particle next = bpso::step(p, p.position, cfg, rng);
        double rate = static_cast<double>(mask_popcount(next.position)) / static_cast<double>(n);
        CHECK(rate >= previous_rate);
        previous_rate = rate;
    }
}

TEST_CASE("steps never produce an empty mask") {
    BpsoConfig cfg;
    Particle p;
    p.position = {1, 0};
    p.best_position = {0, 0};
    p.velocity = {-6.0, -6.0};
    FeatureMask gbest = {0, 0};
    Rng rng(6);
    for (int i = 0; i < 500; ++i) {
        p = bpso::step(p, gbest, cfg, rng);
        CHECK(mask_popcount(p.position) >= 1);
    }
}

TEST_CASE("full-mask fitness on a separable fixture is one") {
    LabeledDataset ds = separable_dataset(12, 41);
    BpsoConfig cfg = small_config(17);
    double f = bpso::fitness({1, 1, 1}, ds, cfg);
    CHECK(f == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pure-noise fitness sits near one quarter") {
    BpsoConfig cfg = small_config(3);
    cfg.boosting_rounds = 2;
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        cfg.seed = seed;
        double f = bpso::fitness({1, 1, 1, 1}, noise_dataset(120, seed), cfg);
        CHECK(f > 0.25 - 0.15);
        CHECK(f < 0.25 + 0.15);
    }
}

TEST_CASE("fitness is deterministic for a fixed seed") {
    LabeledDataset ds = separable_dataset(8, 42);
    BpsoConfig cfg = small_config(23);
    CHECK(bpso::fitness({1, 0, 1}, ds, cfg) == bpso::fitness({1, 0, 1}, ds, cfg));
}

TEST_CASE("empty masks are rejected") {
    LabeledDataset ds = separable_dataset(4, 43);
    BpsoConfig cfg = small_config(1);
    CHECK(error_kind_of([&] { bpso::fitness({0, 0, 0}, ds, cfg); }) == ErrorKind::MaskEmpty);
}

TEST_CASE("a degenerate one-particle run reports its own evaluation") {
    LabeledDataset ds = separable_dataset(8, 44);
    BpsoConfig cfg = small_config(29);
    cfg.swarm_size = 1;
    cfg.generation_limit = 1;
    BpsoResult result = bpso::run(ds, cfg);
    CHECK(result.history.size() == 1);
    CHECK(result.best_fitness == bpso::fitness(result.best_mask, ds, cfg));
    CHECK(result.best_mask == bpso::init_swarm(3, cfg)[0].position);
}

TEST_CASE("history is monotone non-decreasing") {
    LabeledDataset ds = separable_dataset(8, 45);
    BpsoConfig cfg = small_config(31);
    cfg.generation_limit = 5;
    BpsoResult result = bpso::run(ds, cfg);
    for (std::size_t g = 1; g < result.history.size(); ++g)
        CHECK(result.history[g] >= result.history[g - 1]);
    CHECK(result.best_fitness == result.history.back());
}

TEST_CASE("runs are bit-reproducible under a fixed seed") {
    LabeledDataset ds = separable_dataset(8, 46);
    BpsoConfig cfg = small_config(37);
    BpsoResult a = bpso::run(ds, cfg);
    BpsoResult b = bpso::run(ds, cfg);
    CHECK(a.best_mask == b.best_mask);
    CHECK(a.best_fitness == b.best_fitness);
    CHECK(a.history == b.history);
    CHECK(model_to_json(a.final_model) == model_to_json(b.final_model));
}

TEST_CASE("the final model is restricted to the best mask") {
    LabeledDataset ds = separable_dataset(8, 47);
    BpsoConfig cfg = small_config(41);
    BpsoResult result = bpso::run(ds, cfg);
    CHECK(result.final_model.selected_features == mask_indices(result.best_mask));
    CHECK(result.final_model.schema.feature_names == ds.schema.feature_names);
    // the model consumes full-width vectors and projects internally
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(predict(result.final_model, ds.samples[i]) == ds.labels[i]);
}

TEST_CASE("informative features are recovered on a small planted fixture") {
    // features 0-1 carry the signal, 2-7 are noise
    LabeledDataset ds;
    ds.schema = custom_schema({"s0", "s1", "n0", "n1", "n2", "n3", "n4", "n5"});
    ds.class_names = {"a", "b"};
    Rng rng(48);
    for (int i = 0; i < 100; ++i) {
        int c = static_cast<int>(rng.below(2));
        FeatureVector x;
        x.push_back(c * 2.0 + standard_normal(rng) * 0.5);
        x.push_back(-c * 2.0 + standard_normal(rng) * 0.5);
        for (int f = 0; f < 6; ++f) x.push_back(standard_normal(rng));
        ds.samples.push_back(x);
        ds.labels.push_back(c);
    }
    BpsoConfig cfg;
    cfg.swarm_size = 8;
    cfg.generation_limit = 8;
    cfg.boosting_rounds = 3;
    cfg.inner_folds = 2;
    cfg.seed = 49;
    cfg.tree.max_depth = 2;
    BpsoResult result = bpso::run(ds, cfg);
    CHECK(result.best_mask[0] + result.best_mask[1] >= 1);
    CHECK(result.best_fitness > 0.8);
}
