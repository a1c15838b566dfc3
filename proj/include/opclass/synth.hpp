#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opclass/dataset.hpp"
#include "opclass/rng.hpp"

namespace opclass {

// Gaussian feature corpus for ablation experiments: the first `informative`
// columns carry class-dependent means (binary patterns scaled by
// `separation`, unit variance), the remaining `noise` columns are pure N(0,1).
struct SyntheticFeatureSpec {
    std::vector<std::string> class_names = {"governance", "finance", "gambling",
                                            "game",       "wallet",  "social"};
    // 1200 samples, largest/smallest = 19
    std::vector<std::int64_t> class_sizes = {475, 25, 200, 200, 150, 150};
    int informative = 5;
    int noise = 15;
    double separation = 2.5;
};

LabeledDataset make_feature_corpus(const SyntheticFeatureSpec& spec, std::uint64_t seed);

// Contract corpus with category-specific opcode mixes; classes are separable
// from family counts alone. Records match the canonical JSONL layout.
struct SyntheticBytecodeSpec {
    std::vector<std::string> class_names = {"token", "game", "wallet"};
    int per_class = 30;
};

void write_bytecode_corpus(const SyntheticBytecodeSpec& spec, std::uint64_t seed,
                           const std::string& path);

double standard_normal(Rng& rng);

}  // namespace opclass
