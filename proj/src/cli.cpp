#include "opclass/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "opclass/adaboost.hpp"
#include "opclass/bpso.hpp"
#include "opclass/dataset.hpp"
#include "opclass/disasm.hpp"
#include "opclass/ingest.hpp"
#include "opclass/metrics.hpp"

namespace opclass::cli {

namespace {

using nlohmann::ordered_json;

enum class Algorithm { C45, AdaBoost, BpsoC45, BpsoAdaBoost };

Algorithm parse_algorithm(const std::string& name) {
    if (name == "c45") return Algorithm::C45;
    if (name == "adaboost") return Algorithm::AdaBoost;
    if (name == "bpso-c45") return Algorithm::BpsoC45;
    if (name == "bpso-adaboost") return Algorithm::BpsoAdaBoost;
    throw_error(ErrorKind::BadConfig,
                "unknown algorithm '" + name + "' (c45|adaboost|bpso-c45|bpso-adaboost)");
}

SchemaKind parse_features(const std::string& name) {
    if (name == "code") return SchemaKind::Code0Day;
    if (name == "full") return SchemaKind::Full;
    throw_error(ErrorKind::BadConfig, "unknown feature set '" + name + "' (code|full)");
}

struct CommonOpts {
    std::string corpus;
    std::string features = "code";
    std::string algorithm = "adaboost";
    std::uint64_t seed = 0;
    int folds = 10;
    int rounds = 30;
    std::string report;

    TrainControl tree;
    BpsoConfig bpso;  // swarm/velocity parameters; seed and tree filled per run
};

void add_tree_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--max-depth", opts.tree.max_depth, "C4.5 depth cap");
    cmd->add_option("--min-leaf-weight", opts.tree.min_leaf_weight, "C4.5 minimum leaf weight");
    cmd->add_option("--laplace-alpha", opts.tree.laplace_alpha, "Leaf probability smoothing");
}

void add_bpso_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--swarm", opts.bpso.swarm_size, "BPSO particle count");
    cmd->add_option("--generations", opts.bpso.generation_limit, "BPSO generation limit");
    cmd->add_option("--inertia", opts.bpso.inertia, "BPSO inertia weight");
    cmd->add_option("--c1", opts.bpso.c1, "BPSO personal acceleration");
    cmd->add_option("--c2", opts.bpso.c2, "BPSO global acceleration");
    cmd->add_option("--vmax", opts.bpso.v_max, "BPSO velocity clamp");
    cmd->add_option("--inner-folds", opts.bpso.inner_folds, "Fitness cross-validation folds");
    cmd->add_option("--stagnation", opts.bpso.stagnation_limit,
                    "Generations without improvement before convergence");
}

LabeledDataset load_corpus(const CommonOpts& opts) {
    CorpusReadOptions read;
    read.jsonl_features = parse_features(opts.features);
    return read_corpus(opts.corpus, read);
}

std::string fmt_prob(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12f", v);
    return buf;
}

ordered_json schema_json(const FeatureSchema& schema) {
    ordered_json out;
    out["name"] = schema_kind_name(schema.name);
    out["version"] = schema.version;
    out["feature_names"] = schema.feature_names;
    return out;
}

ordered_json eval_json(const EvalReport& report, const std::vector<std::string>& class_names) {
    ordered_json out;
    out["auc_area"] = report.auc_area;  // NaN serializes as null
    out["micro_f1"] = report.micro_f1;
    out["accuracy"] = report.accuracy;
    out["per_class_accuracy"] = report.per_class_accuracy;
    out["confusion"] = report.confusion.counts;
    if (report.pairwise_aucs.empty()) {
        out["pairwise_aucs"] = nullptr;
    } else {
        // AUC_area depends on neighbor order, so the ring order is part of
        // the reported metric
        std::vector<std::string> pair_names;
        for (const auto& [a, b] : canonical_pairs(static_cast<int>(class_names.size())))
            pair_names.push_back(class_names[static_cast<std::size_t>(a)] + "|" +
                                 class_names[static_cast<std::size_t>(b)]);
        out["pairwise_order"] = pair_names;
        out["pairwise_aucs"] = report.pairwise_aucs;
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw_error(ErrorKind::IoError, "cannot write " + path);
    out << text;
    if (!out) throw_error(ErrorKind::IoError, "write to " + path + " failed");
}

AdaBoostModel single_tree_model(const LabeledDataset& ds, const TrainControl& ctrl) {
    AdaBoostModel model;
    model.schema = ds.schema;
    model.class_names = ds.class_names;
    model.selected_features.resize(ds.schema.size());
    for (std::size_t i = 0; i < model.selected_features.size(); ++i)
        model.selected_features[i] = static_cast<int>(i);
    SampleWeights uniform(ds.size(), 1.0 / static_cast<double>(ds.size()));
    // A lone round's vote and score weights cancel out, so the placeholder
    // epsilon/beta never influence predictions.
    model.rounds.push_back(BoostRound{train_tree(ds, uniform, ctrl), 0.0, 1e-10});
    return model;
}

AdaBoostModel train_with_algorithm(const LabeledDataset& train, Algorithm algo,
                                   const CommonOpts& opts, std::uint64_t seed,
                                   ordered_json* bpso_info) {
    switch (algo) {
        case Algorithm::C45:
            return single_tree_model(train, opts.tree);
        case Algorithm::AdaBoost:
            return run_boosting(train, opts.rounds, opts.tree, seed);
        case Algorithm::BpsoC45:
        case Algorithm::BpsoAdaBoost: {
            BpsoConfig cfg = opts.bpso;
            cfg.tree = opts.tree;
            cfg.seed = seed;
            cfg.boosting_rounds = algo == Algorithm::BpsoC45 ? 1 : opts.rounds;
            BpsoResult result = bpso::run(train, cfg);
            if (bpso_info) {
                std::vector<std::string> names;
                for (int f : mask_indices(result.best_mask))
                    names.push_back(train.schema.feature_names[static_cast<std::size_t>(f)]);
                (*bpso_info)["s_best"] = names;
                (*bpso_info)["best_fitness"] = result.best_fitness;
                (*bpso_info)["history"] = result.history;
            }
            return std::move(result.final_model);
        }
    }
    throw_error(ErrorKind::BadConfig, "unreachable algorithm");
}

ordered_json config_json(const CommonOpts& opts, Algorithm algo, bool include_folds) {
    ordered_json cfg;
    cfg["corpus"] = opts.corpus;
    cfg["algorithm"] = opts.algorithm;
    cfg["features"] = opts.features;
    if (include_folds) cfg["folds"] = opts.folds;
    cfg["seed"] = opts.seed;
    cfg["rounds"] = opts.rounds;
    cfg["tree"] = ordered_json{{"max_depth", opts.tree.max_depth},
                               {"min_leaf_weight", opts.tree.min_leaf_weight},
                               {"laplace_alpha", opts.tree.laplace_alpha}};
    if (algo == Algorithm::BpsoC45 || algo == Algorithm::BpsoAdaBoost) {
        cfg["bpso"] = ordered_json{{"swarm_size", opts.bpso.swarm_size},
                                   {"generation_limit", opts.bpso.generation_limit},
                                   {"inertia", opts.bpso.inertia},
                                   {"c1", opts.bpso.c1},
                                   {"c2", opts.bpso.c2},
                                   {"v_max", opts.bpso.v_max},
                                   {"inner_folds", opts.bpso.inner_folds},
                                   {"stagnation_limit", opts.bpso.stagnation_limit}};
    }
    return cfg;
}

// -- subcommand bodies --

int cmd_disasm(const std::string& hex, const std::string& file, bool binary) {
    Bytecode code;
    if (!file.empty()) {
        std::string content = read_text_file(file);
        if (binary) {
            code.bytes.assign(content.begin(), content.end());
            code.source = BytecodeSource::HexFile;
        } else {
            code = parse_hex(content, BytecodeSource::HexFile);
        }
    } else {
        code = parse_hex(hex, BytecodeSource::HexFile);
    }
    std::cout << to_listing(disassemble(code));
    return 0;
}

int cmd_extract(const CommonOpts& opts, const std::string& out_path, int means_top) {
    LabeledDataset ds = load_corpus(opts);
    write_corpus(ds, out_path);
    std::cout << "wrote " << ds.size() << " samples x " << ds.schema.size() << " features to "
              << out_path << '\n';
    if (means_top > 0) {
        for (const CategoryFeatureMeans& cm : category_feature_means(ds)) {
            std::cout << "category " << cm.category << ":\n";
            int shown = 0;
            for (const auto& [feature, mean] : cm.means) {
                if (shown++ >= means_top) break;
                std::cout << "  " << feature << ' ' << mean << '\n';
            }
        }
    }
    return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& model_out) {
    LabeledDataset ds = load_corpus(opts);
    if (ds.class_count() < 2) throw_error(ErrorKind::BadConfig, "training needs >= 2 classes");

    Algorithm algo = parse_algorithm(opts.algorithm);
    ordered_json bpso_info;
    AdaBoostModel model = train_with_algorithm(ds, algo, opts, opts.seed, &bpso_info);
    save_model(model, model_out);

    if (!opts.report.empty()) {
        ordered_json report;
        report["command"] = "train";
        report["config"] = config_json(opts, algo, false);
        report["model"] = model_out;
        report["schema"] = schema_json(model.schema);
        report["class_names"] = model.class_names;
        report["class_counts"] = class_counts(ds);
        report["rounds_kept"] = model.rounds.size();
        if (!bpso_info.empty()) report["bpso"] = bpso_info;
        write_text_file(opts.report, report.dump(2) + "\n");
    }
    std::cout << "trained " << opts.algorithm << " model: " << model.rounds.size() << " round(s), "
              << model.selected_features.size() << "/" << model.schema.size() << " features -> "
              << model_out << '\n';
    return 0;
}

std::optional<AccountFeatures> load_account_json(const std::string& path) {
    if (path.empty()) return std::nullopt;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw_error(ErrorKind::CorpusFormat, std::string("bad account JSON: ") + e.what());
    }
    Wei balance = doc.contains("balance") ? Wei::from_string(doc["balance"].get<std::string>())
                                          : Wei();
    std::int64_t nonce = doc.value("nonce", std::int64_t{0});
    std::vector<TransactionRecord> txs;
    for (const auto& jtx : doc.value("txs", nlohmann::json::array())) {
        TransactionRecord tx;
        tx.timestamp = jtx.at("t").get<std::int64_t>();
        tx.direction = jtx.at("dir").get<std::string>() == "out" ? TxDirection::Out : TxDirection::In;
        tx.value = Wei::from_string(jtx.at("value").get<std::string>());
        tx.counterparty = jtx.value("addr", "");
        txs.push_back(std::move(tx));
    }
    return extract_account_features(balance, nonce, txs);
}

int cmd_classify(const std::string& model_path, const std::string& hex, const std::string& file,
                 const std::string& address, const std::string& rpc_url,
                 const std::string& account_path) {
    AdaBoostModel model = load_model(model_path);

    Bytecode code;
    if (!address.empty()) {
        if (rpc_url.empty()) throw_error(ErrorKind::BadConfig, "--address needs --rpc-url");
        code = fetch_code(RpcEndpoint{rpc_url}, address);
    } else if (!file.empty()) {
        code = parse_hex(read_text_file(file), BytecodeSource::HexFile);
    } else if (!hex.empty()) {
        code = parse_hex(hex, BytecodeSource::HexFile);
    } else {
        throw_error(ErrorKind::BadConfig, "no bytecode given (hex argument, --file or --address)");
    }

    if (model.schema.name == SchemaKind::Custom)
        throw_error(ErrorKind::SchemaMismatch, "model has a custom feature schema; classify "
                                               "expects a code-0day or full model");
    std::optional<AccountFeatures> account = load_account_json(account_path);
    if (model.schema.name == SchemaKind::Full && !account)
        throw_error(ErrorKind::SchemaMismatch,
                    "model uses account features; supply them with --account");

    FeatureVector x = assemble_vector(extract_code_features(code), account, model.schema);
    int category = predict(model, x);
    std::vector<double> proba = predict_proba(model, x);

    std::cout << "category: " << model.class_names[static_cast<std::size_t>(category)] << '\n';
    std::cout << "probabilities:";
    for (std::size_t c = 0; c < proba.size(); ++c)
        std::cout << ' ' << model.class_names[c] << '=' << fmt_prob(proba[c]);
    std::cout << '\n';
    return 0;
}

LabeledDataset load_eval_corpus(const std::string& path, const AdaBoostModel& model) {
    CorpusReadOptions read;
    read.class_names = model.class_names;
    if (model.schema.name != SchemaKind::Custom) read.jsonl_features = model.schema.name;
    LabeledDataset ds = read_corpus(path, read);
    if (ds.schema.feature_names != model.schema.feature_names)
        throw_error(ErrorKind::SchemaMismatch, "corpus features do not match the model schema");
    return ds;
}

int cmd_evaluate(const std::string& model_path, const CommonOpts& opts) {
    AdaBoostModel model = load_model(model_path);
    LabeledDataset ds = load_eval_corpus(opts.corpus, model);

    std::vector<int> predictions(ds.size());
    std::vector<std::vector<double>> scores(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        predictions[i] = predict(model, ds.samples[i]);
        scores[i] = predict_proba(model, ds.samples[i]);
    }
    EvalReport report = evaluate(scores, predictions, ds.labels, model.class_count());

    std::cout << eval_csv_header(model.class_names) << '\n'
              << eval_csv_row(report, "model") << '\n';
    if (!opts.report.empty()) {
        ordered_json doc;
        doc["command"] = "evaluate";
        doc["model"] = model_path;
        doc["corpus"] = opts.corpus;
        doc["class_names"] = model.class_names;
        doc["report"] = eval_json(report, model.class_names);
        write_text_file(opts.report, doc.dump(2) + "\n");
    }
    return 0;
}

int cmd_crossval(const CommonOpts& opts) {
    LabeledDataset ds = load_corpus(opts);
    if (ds.class_count() < 2) throw_error(ErrorKind::BadConfig, "cross-validation needs >= 2 classes");

    Algorithm algo = parse_algorithm(opts.algorithm);
    std::vector<std::int64_t> counts = class_counts(ds);
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] < opts.folds)
            std::cerr << "warning: class '" << ds.class_names[c] << "' has " << counts[c]
                      << " samples, fewer than " << opts.folds << " folds\n";

    FoldPlan plan = stratified_folds(ds, opts.folds, opts.seed);

    std::vector<int> predictions(ds.size(), -1);
    std::vector<std::vector<double>> scores(ds.size());
    ordered_json per_fold = ordered_json::array();
    double auc_sum = 0.0;
    int auc_folds = 0;

    for (int fold = 0; fold < opts.folds; ++fold) {
        LabeledDataset train = subset(ds, plan.train_indices(fold));
        ordered_json bpso_info;
        AdaBoostModel model = train_with_algorithm(
            train, algo, opts, derive_seed(opts.seed, 0xf07d, static_cast<std::uint64_t>(fold)),
            &bpso_info);

        std::vector<std::size_t> test = plan.test_indices(fold);
        std::vector<int> fold_predictions;
        std::vector<std::vector<double>> fold_scores;
        std::vector<int> fold_labels;
        for (std::size_t i : test) {
            predictions[i] = predict(model, ds.samples[i]);
            scores[i] = predict_proba(model, ds.samples[i]);
            fold_predictions.push_back(predictions[i]);
            fold_scores.push_back(scores[i]);
            fold_labels.push_back(ds.labels[i]);
        }

        EvalReport fold_report;
        try {
            fold_report = evaluate(fold_scores, fold_predictions, fold_labels, ds.class_count());
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::MissingClass) throw;
            fold_report = evaluate_counts(fold_predictions, fold_labels, ds.class_count());
        }
        if (std::isfinite(fold_report.auc_area)) {
            auc_sum += fold_report.auc_area;
            ++auc_folds;
        }

        ordered_json entry;
        entry["fold"] = fold;
        entry.update(eval_json(fold_report, ds.class_names));
        if (!bpso_info.empty()) entry["bpso"] = bpso_info;
        per_fold.push_back(std::move(entry));
    }

    EvalReport pooled = evaluate(scores, predictions, ds.labels, ds.class_count());

    ordered_json report;
    report["command"] = "crossval";
    report["config"] = config_json(opts, algo, true);
    report["schema"] = schema_json(ds.schema);
    report["class_names"] = ds.class_names;
    report["class_counts"] = counts;
    report["per_fold"] = std::move(per_fold);
    report["pooled"] = eval_json(pooled, ds.class_names);
    report["mean_fold_auc_area"] =
        auc_folds > 0 ? ordered_json(auc_sum / auc_folds) : ordered_json(nullptr);

    std::string text = report.dump(2) + "\n";
    if (!opts.report.empty())
        write_text_file(opts.report, text);
    else
        std::cout << text;

    std::cout << eval_csv_header(ds.class_names) << '\n'
              << eval_csv_row(pooled, opts.algorithm) << '\n';
    return 0;
}

int cmd_normalize(const std::string& input, const std::string& output) {
    std::size_t count = normalize_corpus(input, output);
    std::cout << "normalized " << count << " record(s) -> " << output << '\n';
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Smart-contract bytecode classifier"};
    app.require_subcommand(1);

    CommonOpts opts;

    // disasm
    std::string hex_arg;
    std::string file_arg;
    bool binary = false;
    auto* disasm = app.add_subcommand("disasm", "Disassemble EVM bytecode to a listing");
    disasm->add_option("hex", hex_arg, "Hex bytecode (0x prefix optional)");
    disasm->add_option("--file", file_arg, "Read bytecode from a file");
    disasm->add_flag("--binary", binary, "Treat --file contents as raw bytes");

    // extract
    std::string out_path;
    int means_top = 0;
    auto* extract = app.add_subcommand("extract", "Extract feature vectors from a raw corpus");
    extract->add_option("--corpus", opts.corpus, "Input corpus (.jsonl or feature CSV)")->required();
    extract->add_option("--features", opts.features, "code|full");
    extract->add_option("--out", out_path, "Output feature CSV")->required();
    extract->add_option("--means-top", means_top, "Print the top-N feature means per category");

    // train
    std::string model_out;
    auto* train = app.add_subcommand("train", "Train a classifier");
    train->add_option("--corpus", opts.corpus, "Training corpus (.jsonl or CSV)")->required();
    train->add_option("--features", opts.features, "code|full (raw corpora)");
    train->add_option("--algorithm", opts.algorithm, "c45|adaboost|bpso-c45|bpso-adaboost");
    train->add_option("--seed", opts.seed, "Random seed")->required();
    train->add_option("--rounds", opts.rounds, "Boosting rounds T");
    train->add_option("--model-out", model_out, "Model output path")->required();
    train->add_option("--report", opts.report, "Training report JSON path");
    add_tree_options(train, opts);
    add_bpso_options(train, opts);

    // classify
    std::string model_path;
    std::string address;
    std::string rpc_url;
    std::string account_path;
    auto* classify = app.add_subcommand("classify", "Classify one contract");
    classify->add_option("hex", hex_arg, "Hex bytecode");
    classify->add_option("--model", model_path, "Model JSON path")->required();
    classify->add_option("--file", file_arg, "Read bytecode from a file");
    classify->add_option("--address", address, "Fetch code for this address over JSON-RPC");
    classify->add_option("--rpc-url", rpc_url, "JSON-RPC endpoint URL")
        ->envname("OPCLASS_RPC_URL");
    classify->add_option("--account", account_path, "Account features JSON (full models)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a model on a labeled corpus");
    evaluate->add_option("--model", model_path, "Model JSON path")->required();
    evaluate->add_option("--corpus", opts.corpus, "Labeled corpus")->required();
    evaluate->add_option("--report", opts.report, "Report JSON path");

    // crossval
    auto* crossval = app.add_subcommand("crossval", "K-fold cross-validation experiment");
    crossval->add_option("--corpus", opts.corpus, "Labeled corpus (.jsonl or CSV)")->required();
    crossval->add_option("--features", opts.features, "code|full (raw corpora)");
    crossval->add_option("--algorithm", opts.algorithm, "c45|adaboost|bpso-c45|bpso-adaboost");
    crossval->add_option("--folds", opts.folds, "Fold count");
    crossval->add_option("--seed", opts.seed, "Random seed")->required();
    crossval->add_option("--rounds", opts.rounds, "Boosting rounds T");
    crossval->add_option("--report", opts.report, "Report JSON path (stdout if omitted)");
    add_tree_options(crossval, opts);
    add_bpso_options(crossval, opts);

    // normalize
    std::string norm_in;
    std::string norm_out;
    auto* normalize = app.add_subcommand("normalize", "Normalize a corpus to canonical JSONL");
    normalize->add_option("--input", norm_in, "JSONL file or directory of <address>_<category>.hex")
        ->required();
    normalize->add_option("--output", norm_out, "Canonical JSONL output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (disasm->parsed()) return cmd_disasm(hex_arg, file_arg, binary);
        if (extract->parsed()) return cmd_extract(opts, out_path, means_top);
        if (train->parsed()) return cmd_train(opts, model_out);
        if (classify->parsed())
            return cmd_classify(model_path, hex_arg, file_arg, address, rpc_url, account_path);
        if (evaluate->parsed()) return cmd_evaluate(model_path, opts);
        if (crossval->parsed()) return cmd_crossval(opts);
        if (normalize->parsed()) return cmd_normalize(norm_in, norm_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::SchemaMismatch ? 3 : 2;
    }
    return 2;
}

}  // namespace opclass::cli
