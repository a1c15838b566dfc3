#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opclass/features.hpp"

namespace opclass {

struct LabeledDataset {
    FeatureSchema schema;
    std::vector<FeatureVector> samples;
    std::vector<int> labels;  // class indices into class_names
    std::vector<std::string> class_names;

    std::size_t size() const { return samples.size(); }
    int class_count() const { return static_cast<int>(class_names.size()); }
};

struct FoldPlan {
    int fold_count = 0;
    std::vector<int> assignments;  // sample index -> fold index
    std::uint64_t seed = 0;

    std::vector<std::size_t> test_indices(int fold) const;
    std::vector<std::size_t> train_indices(int fold) const;
};

std::vector<std::int64_t> class_counts(const LabeledDataset& ds);

// (largest class count) / (smallest class count). EmptyClass if any declared
// class has no samples.
double imbalance_ratio(const LabeledDataset& ds);

// Seeded stratified split: per-class fold counts differ by at most 1.
// Classes smaller than k_folds are allowed; some folds then lack them.
FoldPlan stratified_folds(const LabeledDataset& ds, int k_folds, std::uint64_t seed);

struct CategoryFeatureMeans {
    std::string category;
    std::vector<std::pair<std::string, double>> means;  // sorted descending by mean
};

// Per-class feature means, each class's list sorted descending (ties keep
// schema order; all-missing features rank last). Empty classes are skipped.
// Missing cells are excluded from the mean.
std::vector<CategoryFeatureMeans> category_feature_means(const LabeledDataset& ds);

LabeledDataset subset(const LabeledDataset& ds, const std::vector<std::size_t>& indices);

struct CorpusReadOptions {
    // When set, the file's schema must match (SchemaHeaderMismatch otherwise).
    std::optional<SchemaKind> require_schema;
    // When set, row labels must come from this list (UnknownLabel otherwise)
    // and indices follow its order. Otherwise classes are numbered by first
    // appearance in the file.
    std::optional<std::vector<std::string>> class_names;
    // Feature set to extract when reading a raw JSONL corpus.
    SchemaKind jsonl_features = SchemaKind::Code0Day;
};

// Reads a feature CSV (header `f1,...,fn,label`, empty cell = MISSING) or a
// raw JSONL corpus (one contract record per line), dispatching on the file
// extension (.jsonl is raw, anything else is CSV).
LabeledDataset read_corpus(const std::string& path, const CorpusReadOptions& options = {});

// Writes the feature CSV form. Floats carry 17 significant digits so that
// write-then-read is the identity.
void write_corpus(const LabeledDataset& ds, const std::string& path);

}  // namespace opclass
