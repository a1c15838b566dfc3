#include "opclass/synth.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace opclass {

double standard_normal(Rng& rng) {
    double u1 = 1.0 - rng.uniform();  // (0, 1]
    double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

LabeledDataset make_feature_corpus(const SyntheticFeatureSpec& spec, std::uint64_t seed) {
    if (spec.class_names.size() != spec.class_sizes.size())
        throw_error(ErrorKind::BadConfig, "class_names and class_sizes differ in length");

    const int dim = spec.informative + spec.noise;
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(dim));
    for (int f = 0; f < spec.informative; ++f) names.push_back("inf" + std::to_string(f));
    for (int f = 0; f < spec.noise; ++f) names.push_back("noise" + std::to_string(f));

    LabeledDataset ds;
    ds.schema = custom_schema(std::move(names));
    ds.class_names = spec.class_names;

    Rng rng(derive_seed(seed, 0x5f3a7));
    for (std::size_t c = 0; c < spec.class_sizes.size(); ++c) {
        for (std::int64_t i = 0; i < spec.class_sizes[c]; ++i) {
            FeatureVector x;
            x.reserve(static_cast<std::size_t>(dim));
            for (int f = 0; f < spec.informative; ++f) {
                double mean = (((c + 1) >> f) & 1) ? spec.separation : 0.0;
                x.push_back(mean + standard_normal(rng));
            }
            for (int f = 0; f < spec.noise; ++f) x.push_back(standard_normal(rng));
            ds.samples.push_back(std::move(x));
            ds.labels.push_back(static_cast<int>(c));
        }
    }
    return ds;
}

namespace {

// One characteristic opcode set per category; counts separate the classes.
struct Profile {
    std::vector<std::uint8_t> heavy;
};

const std::vector<Profile>& profiles() {
    static const std::vector<Profile> p = {
        {{0x33, 0x54, 0x55}},  // token: CALLER, SLOAD, SSTORE
        {{0x51, 0x52, 0x42}},  // game: MLOAD, MSTORE, TIMESTAMP
        {{0xf1, 0x31, 0x47}},  // wallet: CALL, BALANCE, SELFBALANCE
    };
    return p;
}

std::string hex_of(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out = "0x";
    for (std::uint8_t b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0xf];
    }
    return out;
}

std::string random_address(Rng& rng) {
    static const char* digits = "0123456789abcdef";
    std::string out = "0x";
    for (int i = 0; i < 40; ++i) out += digits[rng.below(16)];
    return out;
}

}  // namespace

void write_bytecode_corpus(const SyntheticBytecodeSpec& spec, std::uint64_t seed,
                           const std::string& path) {
    if (spec.class_names.size() > profiles().size())
        throw_error(ErrorKind::BadConfig, "at most 3 synthetic bytecode categories");

    std::ofstream out(path);
    if (!out) throw_error(ErrorKind::IoError, "cannot write " + path);

    Rng rng(derive_seed(seed, 0xb17ec));
    for (std::size_t c = 0; c < spec.class_names.size(); ++c) {
        const Profile& profile = profiles()[c];
        for (int i = 0; i < spec.per_class; ++i) {
            std::vector<std::uint8_t> bytes;
            std::uint64_t heavy_ops = 20 + rng.below(40);
            for (std::uint64_t op = 0; op < heavy_ops; ++op) {
                bytes.push_back(0x60);  // PUSH1
                bytes.push_back(static_cast<std::uint8_t>(rng.below(256)));
                bytes.push_back(profile.heavy[op % profile.heavy.size()]);
            }
            std::uint64_t filler_ops = 10 + rng.below(10);
            static const std::uint8_t common[] = {0x01, 0x80, 0x90, 0x50, 0x5b};
            for (std::uint64_t op = 0; op < filler_ops; ++op)
                bytes.push_back(common[op % std::size(common)]);
            bytes.push_back(0x00);  // STOP

            nlohmann::ordered_json rec;
            rec["address"] = random_address(rng);
            rec["bytecode"] = hex_of(bytes);
            rec["category"] = spec.class_names[c];
            rec["balance"] = std::to_string(rng.below(1000000000)) + "000000000";
            rec["nonce"] = static_cast<std::int64_t>(rng.below(50));
            nlohmann::ordered_json txs = nlohmann::ordered_json::array();
            std::uint64_t tx_count = rng.below(6);
            std::int64_t t = 1577836800 + static_cast<std::int64_t>(rng.below(1000000));
            for (std::uint64_t x = 0; x < tx_count; ++x) {
                nlohmann::ordered_json tx;
                tx["t"] = t;
                tx["dir"] = rng.coin() ? "in" : "out";
                tx["value"] = std::to_string(rng.below(1000000)) + "000000000000";
                tx["addr"] = random_address(rng);
                txs.push_back(std::move(tx));
                t += static_cast<std::int64_t>(rng.below(100000) + 1);
            }
            rec["txs"] = std::move(txs);
            out << rec.dump() << '\n';
        }
    }
    if (!out) throw_error(ErrorKind::IoError, "write to " + path + " failed");
}

}  // namespace opclass
