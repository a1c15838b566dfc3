#include "opclass/bpso.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "opclass/dataset.hpp"
#include "opclass/metrics.hpp"

namespace opclass {

namespace {

constexpr std::uint64_t kInitTag = 0x1a171;
constexpr std::uint64_t kStepTag = 0x57e9;
constexpr std::uint64_t kFoldTag = 0xcf01d;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void repair_mask(FeatureMask& mask, Rng& rng) {
    if (mask_popcount(mask) == 0)
        mask[static_cast<std::size_t>(rng.below(mask.size()))] = 1;
}

void validate(const BpsoConfig& cfg) {
    if (cfg.swarm_size < 1) throw_error(ErrorKind::BadConfig, "swarm_size must be >= 1");
    if (cfg.generation_limit < 1) throw_error(ErrorKind::BadConfig, "generation_limit must be >= 1");
    if (cfg.v_max <= 0.0) throw_error(ErrorKind::BadConfig, "v_max must be positive");
    if (cfg.boosting_rounds < 1) throw_error(ErrorKind::BadConfig, "boosting_rounds must be >= 1");
    if (cfg.inner_folds < 2) throw_error(ErrorKind::BadConfig, "inner_folds must be >= 2");
    if (cfg.stagnation_limit < 1) throw_error(ErrorKind::BadConfig, "stagnation_limit must be >= 1");
}

std::vector<FeatureVector> project_columns(const std::vector<FeatureVector>& samples,
                                           const std::vector<int>& columns) {
    std::vector<FeatureVector> out;
    out.reserve(samples.size());
    for (const FeatureVector& row : samples) {
        FeatureVector projected;
        projected.reserve(columns.size());
        for (int f : columns) projected.push_back(row[static_cast<std::size_t>(f)]);
        out.push_back(std::move(projected));
    }
    return out;
}

}  // namespace

std::size_t mask_popcount(const FeatureMask& mask) {
    std::size_t n = 0;
    for (std::uint8_t bit : mask) n += bit ? 1 : 0;
    return n;
}

std::vector<int> mask_indices(const FeatureMask& mask) {
    std::vector<int> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(static_cast<int>(i));
    return out;
}

namespace bpso {

std::vector<Particle> init_swarm(std::size_t feature_count, const BpsoConfig& cfg) {
    if (feature_count < 1) throw_error(ErrorKind::BadConfig, "need at least one feature");
    std::vector<Particle> swarm;
    swarm.reserve(static_cast<std::size_t>(cfg.swarm_size));
    for (int p = 0; p < cfg.swarm_size; ++p) {
        Rng rng(derive_seed(cfg.seed, kInitTag, static_cast<std::uint64_t>(p)));
        Particle particle;
        particle.position.resize(feature_count);
        for (auto& bit : particle.position) bit = rng.coin() ? 1 : 0;
        repair_mask(particle.position, rng);
        particle.velocity.resize(feature_count);
        for (auto& v : particle.velocity) v = rng.uniform(-cfg.v_max, cfg.v_max);
        particle.best_position = particle.position;
        swarm.push_back(std::move(particle));
    }
    return swarm;
}

Particle step(const Particle& particle, const FeatureMask& global_best, const BpsoConfig& cfg,
              Rng& rng) {
    Particle next = particle;
    for (std::size_t j = 0; j < next.position.size(); ++j) {
        double r1 = rng.uniform();
        double r2 = rng.uniform();
        double x = next.position[j];
        double v = cfg.inertia * next.velocity[j] +
                   cfg.c1 * r1 * (static_cast<double>(next.best_position[j]) - x) +
                   cfg.c2 * r2 * (static_cast<double>(global_best[j]) - x);
        v = std::clamp(v, -cfg.v_max, cfg.v_max);
        next.velocity[j] = v;
        next.position[j] = rng.uniform() < sigmoid(v) ? 1 : 0;
    }
    repair_mask(next.position, rng);
    return next;
}

double fitness(const FeatureMask& mask, const LabeledDataset& train, const BpsoConfig& cfg) {
    std::vector<int> columns = mask_indices(mask);
    if (columns.empty()) throw_error(ErrorKind::MaskEmpty, "feature mask selects nothing");

    std::vector<FeatureVector> masked = project_columns(train.samples, columns);
    FoldPlan plan = stratified_folds(train, cfg.inner_folds, derive_seed(cfg.seed, kFoldTag));

    const int k = train.class_count();
    std::vector<std::vector<double>> pooled(train.size());
    for (int fold = 0; fold < plan.fold_count; ++fold) {
        std::vector<std::size_t> tr = plan.train_indices(fold);
        std::vector<FeatureVector> fold_samples;
        std::vector<int> fold_labels;
        fold_samples.reserve(tr.size());
        fold_labels.reserve(tr.size());
        for (std::size_t i : tr) {
            fold_samples.push_back(masked[i]);
            fold_labels.push_back(train.labels[i]);
        }
        std::vector<BoostRound> rounds =
            boost_rounds(fold_samples, fold_labels, k, cfg.boosting_rounds, cfg.tree);
        for (std::size_t i : plan.test_indices(fold))
            pooled[i] = rounds_proba(rounds, masked[i], k);
    }
    return auc_area(pairwise_auc_set(pooled, train.labels, k));
}

BpsoResult run(const LabeledDataset& train, const BpsoConfig& cfg) {
    validate(cfg);
    if (train.size() == 0) throw_error(ErrorKind::EmptyDataset, "empty training set");

    std::vector<Particle> swarm = init_swarm(train.schema.size(), cfg);

    // Fitness is pure in (mask, cfg.seed), so repeat masks hit the cache; a
    // converging swarm re-submits the global best constantly.
    std::map<FeatureMask, double> cache;
    bool any_success = false;

    FeatureMask gbest_mask;
    double gbest_fitness = -1.0;
    std::vector<double> history;
    int stagnant = 0;

    auto evaluate = [&](const FeatureMask& mask) {
        auto it = cache.find(mask);
        if (it != cache.end()) return it->second;
        double value;
        try {
            value = fitness(mask, train, cfg);
            any_success = true;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::FirstRoundTooWeak) throw;
            value = -1.0;  // below every valid AUC_area
        }
        cache.emplace(mask, value);
        return value;
    };

    for (int gen = 0; gen < cfg.generation_limit; ++gen) {
        bool improved = false;
        for (Particle& particle : swarm) {
            double value = evaluate(particle.position);
            if (!particle.evaluated || value > particle.best_fitness) {
                particle.best_fitness = value;
                particle.best_position = particle.position;
                particle.evaluated = true;
            }
            if (gbest_mask.empty() || value > gbest_fitness) {
                gbest_fitness = value;
                gbest_mask = particle.position;
                improved = true;
            }
        }
        history.push_back(gbest_fitness);

        stagnant = improved ? 0 : stagnant + 1;
        if (gen + 1 >= cfg.generation_limit || stagnant >= cfg.stagnation_limit) break;

        for (std::size_t p = 0; p < swarm.size(); ++p) {
            Rng rng(derive_seed(cfg.seed, (kStepTag << 20) | static_cast<std::uint64_t>(gen),
                                static_cast<std::uint64_t>(p)));
            swarm[p] = step(swarm[p], gbest_mask, cfg, rng);
        }
    }

    if (!any_success)
        throw_error(ErrorKind::FirstRoundTooWeak, "every evaluated feature mask failed to boost");

    BpsoResult result;
    result.best_mask = gbest_mask;
    result.best_fitness = gbest_fitness;
    result.history = std::move(history);

    std::vector<int> columns = mask_indices(gbest_mask);
    result.final_model.schema = train.schema;
    result.final_model.class_names = train.class_names;
    result.final_model.selected_features = columns;
    result.final_model.rounds =
        boost_rounds(project_columns(train.samples, columns), train.labels, train.class_count(),
                     cfg.boosting_rounds, cfg.tree);
    return result;
}

}  // namespace bpso
}  // namespace opclass
