#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opclass/disasm.hpp"
#include "opclass/wei.hpp"

namespace opclass {

using FeatureVector = std::vector<double>;

// Missing cells travel as NaN inside feature vectors; the tree learner and
// the CSV writer both treat NaN as the distinguished MISSING marker.
double missing_value();
bool is_missing(double v);

// The two canonical schemas plus Custom for feature CSVs that carry their
// own header (synthetic experiment corpora, external feature tables).
enum class SchemaKind { Code0Day, Full, Custom };

const char* schema_kind_name(SchemaKind kind);

struct FeatureSchema {
    SchemaKind name = SchemaKind::Code0Day;
    std::vector<std::string> feature_names;
    int version = 1;

    std::size_t size() const { return feature_names.size(); }

    friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
        return a.name == b.name && a.feature_names == b.feature_names && a.version == b.version;
    }
};

// Opcode families in canonical order: ascending minimum opcode value per
// family over the table (PUSH keys on 0x60, INVALID on 0xfe).
const std::vector<std::string>& canonical_families();

// The twelve account feature names, in their documented order.
const std::vector<std::string>& account_feature_names();

// code-0day = canonical families followed by "size"; full appends the
// account feature names.
const FeatureSchema& code_0day_schema();
const FeatureSchema& full_schema();
const FeatureSchema& schema_for(SchemaKind kind);

// Schema around an arbitrary (unique, non-empty) feature-name list.
FeatureSchema custom_schema(std::vector<std::string> feature_names);

struct CodeFeatures {
    std::map<std::string, std::int64_t> counts;  // family -> raw count, every family present
    std::int64_t size = 0;                       // byte length of the bytecode
};

enum class TxDirection { In, Out };

struct TransactionRecord {
    std::int64_t timestamp = 0;  // unix seconds
    TxDirection direction = TxDirection::In;
    Wei value;
    std::string counterparty;
};

struct AccountFeatures {
    std::optional<Wei> balance;
    std::optional<std::int64_t> nonce;
    std::optional<std::int64_t> nbr_trans_act;
    std::optional<std::int64_t> nbr_trans_psv;
    std::optional<Wei> eth_in;
    std::optional<Wei> eth_out;
    std::optional<double> eth_avg;
    std::optional<double> eth_sdev;
    std::optional<std::int64_t> lifetime;  // seconds
    std::optional<double> trs_gap_avg;
    std::optional<double> trs_gap_sdev;
    std::optional<std::int64_t> nbr_addr;

    // All twelve fields MISSING, for records without account information.
    static AccountFeatures all_missing() { return AccountFeatures{}; }

    // Widens to the 12 schema cells; MISSING becomes NaN here.
    std::vector<double> to_cells() const;
};

// PUSH7 -> PUSH, DUP2 -> DUP, SWAP16 -> SWAP, LOG3 -> LOG; everything else
// unchanged (KECCAK256 and MSTORE8 keep their digits).
std::string merge_family(const std::string& mnemonic);

// Raw opcode-family counts plus bytecode size. Families absent from the code
// are present with count 0.
CodeFeatures extract_code_features(const Bytecode& code);

// Statistics over the transaction history; sorts by timestamp internally.
// Empty history: counting and sum fields are 0, statistics fields MISSING.
// Standard deviations are population deviations.
AccountFeatures extract_account_features(const Wei& balance, std::int64_t nonce,
                                         const std::vector<TransactionRecord>& txs);

// Dense vector ordered per schema.feature_names. The full schema requires
// account features (SchemaMismatch otherwise); code-0day ignores them.
FeatureVector assemble_vector(const CodeFeatures& code,
                              const std::optional<AccountFeatures>& account,
                              const FeatureSchema& schema);

}  // namespace opclass
