#pragma once

#include <cstdint>
#include <vector>

#include "opclass/adaboost.hpp"
#include "opclass/rng.hpp"

namespace opclass {

using FeatureMask = std::vector<std::uint8_t>;  // one bit per feature column

struct Particle {
    FeatureMask position;
    std::vector<double> velocity;
    FeatureMask best_position;
    double best_fitness = -1.0;  // below any attainable AUC_area
    bool evaluated = false;
};

struct BpsoConfig {
    int swarm_size = 30;
    int generation_limit = 50;
    double inertia = 0.73;
    double c1 = 1.5;
    double c2 = 1.5;
    double v_max = 6.0;
    int boosting_rounds = 30;
    int inner_folds = 3;
    std::uint64_t seed = 0;
    TrainControl tree;  // weak-learner control used inside every fitness evaluation

    // Convergence: stop once the global best has not improved for this many
    // consecutive generations.
    int stagnation_limit = 10;
};

struct BpsoResult {
    FeatureMask best_mask;
    double best_fitness = 0.0;
    AdaBoostModel final_model;  // retrained on the full training set under best_mask
    std::vector<double> history;  // global best fitness after each generation
};

std::size_t mask_popcount(const FeatureMask& mask);
std::vector<int> mask_indices(const FeatureMask& mask);

namespace bpso {

// Random positions and velocities in [-v_max, v_max]; every mask is repaired
// to keep at least one bit set. Deterministic given cfg.seed.
std::vector<Particle> init_swarm(std::size_t feature_count, const BpsoConfig& cfg);

// One velocity/position update against the global best:
//   v <- w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x), clamped to [-v_max, v_max]
//   bit <- 1 with probability sigmoid(v)
// followed by the same non-empty repair. Draw order per component is r1, r2,
// then the threshold uniform, so a given rng state fixes the outcome.
Particle step(const Particle& particle, const FeatureMask& global_best, const BpsoConfig& cfg,
              Rng& rng);

// Fitness of a mask: stratified inner-fold cross-validation on the training
// set, an AdaBoost.M1 ensemble per fold on the masked columns, pooled
// out-of-fold strong scores, normalized AUC_area of the pool. Pure in
// (mask, train, cfg): the inner fold plan derives from cfg.seed alone, so
// identical masks always score identically.
double fitness(const FeatureMask& mask, const LabeledDataset& train, const BpsoConfig& cfg);

// The full optimization loop. Masks whose fitness evaluation aborts with
// FirstRoundTooWeak score below every valid mask; the error propagates only
// if every evaluated mask fails.
BpsoResult run(const LabeledDataset& train, const BpsoConfig& cfg);

}  // namespace bpso
}  // namespace opclass
