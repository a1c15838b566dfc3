#include "opclass/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace opclass {

double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

bool is_missing(double v) { return std::isnan(v); }

const char* schema_kind_name(SchemaKind kind) {
    switch (kind) {
        case SchemaKind::Code0Day: return "code-0day";
        case SchemaKind::Full: return "full";
        case SchemaKind::Custom: return "custom";
    }
    return "custom";
}

const std::vector<std::string>& canonical_families() {
    static const std::vector<std::string> families = [] {
        std::vector<std::string> out;
        for (const OpcodeSpec& spec : opcode_table()) {
            if (std::find(out.begin(), out.end(), spec.family) == out.end())
                out.push_back(spec.family);
        }
        return out;
    }();
    return families;
}

const std::vector<std::string>& account_feature_names() {
    static const std::vector<std::string> names = {
        "balance",      "nonce",   "nbr_trans_act", "nbr_trans_psv",
        "eth_in",       "eth_out", "eth_avg",       "eth_sdev",
        "lifetime",     "trs_gap_avg", "trs_gap_sdev", "nbr_addr",
    };
    return names;
}

const FeatureSchema& code_0day_schema() {
    static const FeatureSchema schema = [] {
        FeatureSchema s;
        s.name = SchemaKind::Code0Day;
        s.feature_names = canonical_families();
        s.feature_names.push_back("size");
        s.version = 1;
        return s;
    }();
    return schema;
}

const FeatureSchema& full_schema() {
    static const FeatureSchema schema = [] {
        FeatureSchema s = code_0day_schema();
        s.name = SchemaKind::Full;
        const auto& account = account_feature_names();
        s.feature_names.insert(s.feature_names.end(), account.begin(), account.end());
        return s;
    }();
    return schema;
}

const FeatureSchema& schema_for(SchemaKind kind) {
    if (kind == SchemaKind::Custom)
        throw_error(ErrorKind::BadConfig, "custom schemas come from file headers, not by kind");
    return kind == SchemaKind::Code0Day ? code_0day_schema() : full_schema();
}

FeatureSchema custom_schema(std::vector<std::string> feature_names) {
    if (feature_names.empty())
        throw_error(ErrorKind::SchemaHeaderMismatch, "a schema needs at least one feature");
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        if (feature_names[i].empty())
            throw_error(ErrorKind::SchemaHeaderMismatch, "empty feature name");
        for (std::size_t j = i + 1; j < feature_names.size(); ++j)
            if (feature_names[i] == feature_names[j])
                throw_error(ErrorKind::SchemaHeaderMismatch,
                            "duplicate feature name '" + feature_names[i] + "'");
    }
    FeatureSchema s;
    s.name = SchemaKind::Custom;
    s.feature_names = std::move(feature_names);
    s.version = 1;
    return s;
}

std::string merge_family(const std::string& mnemonic) {
    static const char* prefixes[] = {"PUSH", "DUP", "SWAP", "LOG"};
    for (const char* prefix : prefixes) {
        std::size_t len = std::string(prefix).size();
        if (mnemonic.size() > len && mnemonic.compare(0, len, prefix) == 0) {
            bool digits = true;
            for (std::size_t i = len; i < mnemonic.size(); ++i)
                if (mnemonic[i] < '0' || mnemonic[i] > '9') digits = false;
            if (digits) return prefix;
        }
    }
    return mnemonic;
}

CodeFeatures extract_code_features(const Bytecode& code) {
    CodeFeatures features;
    for (const std::string& family : canonical_families()) features.counts[family] = 0;
    for (const Instruction& ins : disassemble(code)) features.counts[ins.spec.family] += 1;
    features.size = static_cast<std::int64_t>(code.bytes.size());
    return features;
}

namespace {

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double population_sdev(const std::vector<double>& values, double mean) {
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(values.size()));
}

}  // namespace

AccountFeatures extract_account_features(const Wei& balance, std::int64_t nonce,
                                         const std::vector<TransactionRecord>& txs) {
    AccountFeatures out;
    out.balance = balance;
    out.nonce = nonce;

    std::vector<TransactionRecord> sorted = txs;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const TransactionRecord& a, const TransactionRecord& b) {
                         return a.timestamp < b.timestamp;
                     });

    std::int64_t act = 0;
    std::int64_t psv = 0;
    Wei eth_in;
    Wei eth_out;
    std::set<std::string> counterparties;
    std::vector<double> values;
    values.reserve(sorted.size());
    for (const TransactionRecord& tx : sorted) {
        if (tx.direction == TxDirection::Out) {
            ++act;
            eth_out += tx.value;
        } else {
            ++psv;
            eth_in += tx.value;
        }
        counterparties.insert(tx.counterparty);
        values.push_back(tx.value.to_double());
    }
    out.nbr_trans_act = act;
    out.nbr_trans_psv = psv;
    out.eth_in = eth_in;
    out.eth_out = eth_out;
    out.nbr_addr = static_cast<std::int64_t>(counterparties.size());

    if (!values.empty()) {
        double avg = mean_of(values);
        out.eth_avg = avg;
        out.eth_sdev = population_sdev(values, avg);
    }

    if (sorted.size() >= 2) {
        out.lifetime = sorted.back().timestamp - sorted.front().timestamp;
        std::vector<double> gaps;
        gaps.reserve(sorted.size() - 1);
        for (std::size_t i = 1; i < sorted.size(); ++i)
            gaps.push_back(static_cast<double>(sorted[i].timestamp - sorted[i - 1].timestamp));
        double avg = mean_of(gaps);
        out.trs_gap_avg = avg;
        out.trs_gap_sdev = population_sdev(gaps, avg);
    } else {
        out.lifetime = 0;
    }
    return out;
}

std::vector<double> AccountFeatures::to_cells() const {
    auto num = [](const std::optional<std::int64_t>& v) {
        return v ? static_cast<double>(*v) : missing_value();
    };
    auto wei = [](const std::optional<Wei>& v) { return v ? v->to_double() : missing_value(); };
    auto real = [](const std::optional<double>& v) { return v ? *v : missing_value(); };
    return {
        wei(balance),   num(nonce),       num(nbr_trans_act), num(nbr_trans_psv),
        wei(eth_in),    wei(eth_out),     real(eth_avg),      real(eth_sdev),
        num(lifetime),  real(trs_gap_avg), real(trs_gap_sdev), num(nbr_addr),
    };
}

FeatureVector assemble_vector(const CodeFeatures& code,
                              const std::optional<AccountFeatures>& account,
                              const FeatureSchema& schema) {
    if (schema.name == SchemaKind::Full && !account)
        throw_error(ErrorKind::SchemaMismatch, "full schema requires account features");

    FeatureVector vec;
    vec.reserve(schema.size());
    for (const std::string& family : canonical_families()) {
        auto it = code.counts.find(family);
        vec.push_back(it == code.counts.end() ? 0.0 : static_cast<double>(it->second));
    }
    vec.push_back(static_cast<double>(code.size));

    if (schema.name == SchemaKind::Full) {
        std::vector<double> cells = account->to_cells();
        vec.insert(vec.end(), cells.begin(), cells.end());
    }
    return vec;
}

}  // namespace opclass
