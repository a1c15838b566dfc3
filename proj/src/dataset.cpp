#include "opclass/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "opclass/rng.hpp"

namespace opclass {

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

std::vector<std::int64_t> class_counts(const LabeledDataset& ds) {
    std::vector<std::int64_t> counts(ds.class_names.size(), 0);
    for (int label : ds.labels) counts[static_cast<std::size_t>(label)] += 1;
    return counts;
}

double imbalance_ratio(const LabeledDataset& ds) {
    const auto counts = class_counts(ds);
    if (counts.empty()) throw_error(ErrorKind::EmptyClass, "dataset declares no classes");
    std::int64_t lo = counts[0];
    std::int64_t hi = counts[0];
    for (std::int64_t c : counts) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    if (lo == 0) throw_error(ErrorKind::EmptyClass, "a declared class has no samples");
    return static_cast<double>(hi) / static_cast<double>(lo);
}

FoldPlan stratified_folds(const LabeledDataset& ds, int k_folds, std::uint64_t seed) {
    if (k_folds < 2)
        throw_error(ErrorKind::BadFoldCount, "fold count must be >= 2, got " + std::to_string(k_folds));

    FoldPlan plan;
    plan.fold_count = k_folds;
    plan.seed = seed;
    plan.assignments.assign(ds.size(), -1);

    std::vector<std::vector<std::size_t>> by_class(ds.class_names.size());
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);

    // Deal each class round-robin from a running offset so remainders spread
    // over different folds instead of piling onto fold 0.
    int offset = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        Rng rng(derive_seed(seed, 0xf01d5, c));
        shuffle(members, rng);
        for (std::size_t j = 0; j < members.size(); ++j)
            plan.assignments[members[j]] = (offset + static_cast<int>(j)) % k_folds;
        offset = (offset + static_cast<int>(members.size())) % k_folds;
    }
    return plan;
}

std::vector<CategoryFeatureMeans> category_feature_means(const LabeledDataset& ds) {
    std::vector<CategoryFeatureMeans> out;
    const std::size_t dim = ds.schema.size();
    for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
        std::vector<double> sums(dim, 0.0);
        std::vector<std::int64_t> present(dim, 0);
        std::int64_t members = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.labels[i] != static_cast<int>(c)) continue;
            ++members;
            for (std::size_t f = 0; f < dim; ++f) {
                double v = ds.samples[i][f];
                if (!is_missing(v)) {
                    sums[f] += v;
                    present[f] += 1;
                }
            }
        }
        if (members == 0) continue;

        CategoryFeatureMeans cm;
        cm.category = ds.class_names[c];
        cm.means.reserve(dim);
        for (std::size_t f = 0; f < dim; ++f) {
            double mean = present[f] > 0 ? sums[f] / static_cast<double>(present[f]) : missing_value();
            cm.means.emplace_back(ds.schema.feature_names[f], mean);
        }
        std::stable_sort(cm.means.begin(), cm.means.end(), [](const auto& a, const auto& b) {
            if (is_missing(a.second)) return false;  // all-missing sinks to the end
            if (is_missing(b.second)) return true;
            return a.second > b.second;
        });
        out.push_back(std::move(cm));
    }
    return out;
}

LabeledDataset subset(const LabeledDataset& ds, const std::vector<std::size_t>& indices) {
    LabeledDataset out;
    out.schema = ds.schema;
    out.class_names = ds.class_names;
    out.samples.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        out.samples.push_back(ds.samples[i]);
        out.labels.push_back(ds.labels[i]);
    }
    return out;
}

namespace {

std::string format_cell(double v) {
    if (is_missing(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell += ch;
        }
    }
    cells.push_back(cell);
    return cells;
}

FeatureSchema match_header(const std::vector<std::string>& cells, const std::string& path) {
    if (cells.size() < 2 || cells.back() != "label")
        throw_error(ErrorKind::SchemaHeaderMismatch,
                    "header of " + path + " must end with a 'label' column");
    for (const FeatureSchema* schema : {&code_0day_schema(), &full_schema()}) {
        if (cells.size() != schema->size() + 1) continue;
        bool ok = true;
        for (std::size_t i = 0; i < schema->size(); ++i)
            if (cells[i] != schema->feature_names[i]) ok = false;
        if (ok) return *schema;
    }
    return custom_schema(std::vector<std::string>(cells.begin(), cells.end() - 1));
}

int label_index(const std::string& label, std::vector<std::string>& class_names,
                bool fixed_classes, std::size_t line_no) {
    auto it = std::find(class_names.begin(), class_names.end(), label);
    if (it != class_names.end()) return static_cast<int>(it - class_names.begin());
    if (fixed_classes)
        throw_error(ErrorKind::UnknownLabel,
                    "label '" + label + "' on line " + std::to_string(line_no) +
                        " is not a known class");
    class_names.push_back(label);
    return static_cast<int>(class_names.size()) - 1;
}

LabeledDataset read_csv(const std::string& path, const CorpusReadOptions& options) {
    std::ifstream in(path);
    if (!in) throw_error(ErrorKind::IoError, "cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw_error(ErrorKind::SchemaHeaderMismatch, path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const FeatureSchema schema = match_header(split_line(line), path);
    if (options.require_schema && schema.name != *options.require_schema)
        throw_error(ErrorKind::SchemaHeaderMismatch,
                    path + " holds a " + schema_kind_name(schema.name) + " corpus, expected " +
                        schema_kind_name(*options.require_schema));

    LabeledDataset ds;
    ds.schema = schema;
    bool fixed_classes = options.class_names.has_value();
    if (fixed_classes) ds.class_names = *options.class_names;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != schema.size() + 1)
            throw_error(ErrorKind::RaggedRow, "line " + std::to_string(line_no) + " has " +
                                                  std::to_string(cells.size()) + " cells, expected " +
                                                  std::to_string(schema.size() + 1));
        FeatureVector vec;
        vec.reserve(schema.size());
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (cells[i].empty()) {
                vec.push_back(missing_value());
                continue;
            }
            char* end = nullptr;
            double v = std::strtod(cells[i].c_str(), &end);
            if (end == cells[i].c_str() || *end != '\0')
                throw_error(ErrorKind::CorpusFormat, "bad numeric cell '" + cells[i] + "' on line " +
                                                         std::to_string(line_no));
            vec.push_back(v);
        }
        ds.samples.push_back(std::move(vec));
        ds.labels.push_back(label_index(cells.back(), ds.class_names, fixed_classes, line_no));
    }
    return ds;
}

LabeledDataset read_jsonl(const std::string& path, const CorpusReadOptions& options) {
    std::ifstream in(path);
    if (!in) throw_error(ErrorKind::IoError, "cannot open " + path);

    const FeatureSchema& schema = schema_for(options.jsonl_features);
    LabeledDataset ds;
    ds.schema = schema;
    bool fixed_classes = options.class_names.has_value();
    if (fixed_classes) ds.class_names = *options.class_names;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw_error(ErrorKind::CorpusFormat,
                        "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!rec.contains("bytecode") || !rec.contains("category"))
            throw_error(ErrorKind::CorpusFormat,
                        "line " + std::to_string(line_no) + " lacks bytecode or category");

        Bytecode code;
        try {
            code = parse_hex(rec["bytecode"].get<std::string>(), BytecodeSource::JsonlRecord);
        } catch (const Error& e) {
            throw_error(ErrorKind::CorpusFormat,
                        "line " + std::to_string(line_no) + ": " + e.what());
        }
        CodeFeatures code_features = extract_code_features(code);

        std::optional<AccountFeatures> account;
        if (schema.name == SchemaKind::Full) {
            if (rec.contains("balance") || rec.contains("txs") || rec.contains("nonce")) {
                Wei balance = rec.contains("balance")
                                  ? Wei::from_string(rec["balance"].get<std::string>())
                                  : Wei();
                std::int64_t nonce = rec.value("nonce", 0);
                std::vector<TransactionRecord> txs;
                for (const auto& jtx : rec.value("txs", nlohmann::json::array())) {
                    TransactionRecord tx;
                    tx.timestamp = jtx.at("t").get<std::int64_t>();
                    if (tx.timestamp < 0)
                        throw_error(ErrorKind::CorpusFormat, "negative timestamp on line " +
                                                                 std::to_string(line_no));
                    tx.direction =
                        jtx.at("dir").get<std::string>() == "out" ? TxDirection::Out : TxDirection::In;
                    tx.value = Wei::from_string(jtx.at("value").get<std::string>());
                    tx.counterparty = jtx.value("addr", "");
                    txs.push_back(std::move(tx));
                }
                account = extract_account_features(balance, nonce, txs);
            } else {
                account = AccountFeatures::all_missing();
            }
        }

        ds.samples.push_back(assemble_vector(code_features, account, schema));
        ds.labels.push_back(
            label_index(rec["category"].get<std::string>(), ds.class_names, fixed_classes, line_no));
    }
    return ds;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

LabeledDataset read_corpus(const std::string& path, const CorpusReadOptions& options) {
    if (has_suffix(path, ".jsonl")) return read_jsonl(path, options);
    return read_csv(path, options);
}

void write_corpus(const LabeledDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_error(ErrorKind::IoError, "cannot write " + path);

    for (std::size_t i = 0; i < ds.schema.size(); ++i) out << ds.schema.feature_names[i] << ',';
    out << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (double v : ds.samples[i]) out << format_cell(v) << ',';
        out << ds.class_names[static_cast<std::size_t>(ds.labels[i])] << '\n';
    }
    if (!out) throw_error(ErrorKind::IoError, "write to " + path + " failed");
}

}  // namespace opclass
