// Regenerates the bundled synthetic corpora under data/.
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "opclass/dataset.hpp"
#include "opclass/synth.hpp"

int main(int argc, char** argv) {
    using namespace opclass;
    if (argc != 4 && argc != 5) {
        std::cerr << "usage: make_synth_corpus features|bytecode <seed> <output> [per_class]\n"
                  << "  features: 6-class Gaussian feature CSV (1200 samples, ratio 19)\n"
                  << "  bytecode: 3-class contract JSONL (default 30 per class)\n";
        return 2;
    }
    std::string kind = argv[1];
    std::uint64_t seed = std::strtoull(argv[2], nullptr, 10);
    std::string out = argv[3];

    try {
        if (kind == "features") {
            write_corpus(make_feature_corpus(SyntheticFeatureSpec{}, seed), out);
        } else if (kind == "bytecode") {
            SyntheticBytecodeSpec spec;
            if (argc == 5) spec.per_class = std::atoi(argv[4]);
            write_bytecode_corpus(spec, seed, out);
        } else {
            std::cerr << "unknown corpus kind '" << kind << "'\n";
            return 2;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    std::cout << "wrote " << out << '\n';
    return 0;
}
