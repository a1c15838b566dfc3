#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "opclass/ingest.hpp"
#include "opclass/synth.hpp"
#include "support/helpers.hpp"
#include "support/process.hpp"

using namespace opclass;
using testsupport::ProcessResult;
using testsupport::run_process;
using testsupport::TempDir;

namespace {

const std::string kBin = OPCLASS_BIN_PATH;

std::string make_corpus(const TempDir& dir, int per_class, std::uint64_t seed) {
    std::string path = dir.file("corpus.jsonl");
    SyntheticBytecodeSpec spec;
    spec.per_class = per_class;
    write_bytecode_corpus(spec, seed, path);
    return path;
}

nlohmann::json first_record(const std::string& jsonl_path) {
    std::ifstream in(jsonl_path);
    std::string line;
    REQUIRE(std::getline(in, line));
    return nlohmann::json::parse(line);
}

}  // namespace

TEST_CASE("disasm prints the listing") {
    ProcessResult r = run_process(kBin + " disasm 0x6001");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "0000: PUSH1 0x01\n");
}

TEST_CASE("disasm of empty input prints nothing") {
    ProcessResult r = run_process(kBin + " disasm ''");
    CHECK(r.exit_code == 0);
    CHECK(r.output.empty());
}

TEST_CASE("disasm exits 2 on a parse error") {
    ProcessResult r = run_process(kBin + " disasm 0x6");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("OddLength") != std::string::npos);
}

TEST_CASE("disasm reads hex files") {
    TempDir dir;
    std::ofstream(dir.file("code.hex")) << "0x600154\n";
    ProcessResult r = run_process(kBin + " disasm --file " + dir.file("code.hex"));
    CHECK(r.exit_code == 0);
    CHECK(r.output == "0000: PUSH1 0x01\n0002: SLOAD\n");
}

TEST_CASE("extract writes a feature csv") {
    TempDir dir;
    std::string corpus = make_corpus(dir, 5, 1);
    std::string csv = dir.file("features.csv");
    ProcessResult r = run_process(kBin + " extract --corpus " + corpus + " --out " + csv +
                                  " --means-top 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("wrote 15 samples") != std::string::npos);
    CHECK(r.output.find("category token:") != std::string::npos);

    std::ifstream in(csv);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header.rfind("STOP,", 0) == 0);
    CHECK(header.find(",size,label") != std::string::npos);
}

TEST_CASE("train, classify and evaluate round trip") {
    TempDir dir;
    std::string corpus = make_corpus(dir, 8, 2);
    std::string model = dir.file("model.json");

    ProcessResult train = run_process(kBin + " train --corpus " + corpus +
                                      " --algorithm adaboost --rounds 5 --seed 7 --model-out " +
                                      model);
    CHECK(train.exit_code == 0);
    CHECK(std::filesystem::exists(model));

    nlohmann::json rec = first_record(corpus);
    ProcessResult classify =
        run_process(kBin + " classify --model " + model + " " + rec["bytecode"].get<std::string>());
    CHECK(classify.exit_code == 0);
    CHECK(classify.output.find("category: " + rec["category"].get<std::string>()) !=
          std::string::npos);

    // printed probabilities sum to 1
    auto pos = classify.output.find("probabilities:");
    REQUIRE(pos != std::string::npos);
    double sum = 0.0;
    std::string tail = classify.output.substr(pos);
    for (std::size_t at = tail.find('='); at != std::string::npos; at = tail.find('=', at + 1))
        sum += std::stod(tail.substr(at + 1));
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    ProcessResult eval = run_process(kBin + " evaluate --model " + model + " --corpus " + corpus);
    CHECK(eval.exit_code == 0);
    CHECK(eval.output.find("algorithm,auc_area,micro_f1,accuracy") != std::string::npos);
    CHECK(eval.output.find("model,1.000000,1.000000,1.000000") != std::string::npos);
}

TEST_CASE("a full-feature model without account features exits 3") {
    TempDir dir;
    std::string corpus = make_corpus(dir, 6, 3);
    std::string model = dir.file("full_model.json");
    ProcessResult train = run_process(kBin + " train --corpus " + corpus +
                                      " --features full --algorithm c45 --seed 1 --model-out " +
                                      model);
    REQUIRE(train.exit_code == 0);

    ProcessResult classify = run_process(kBin + " classify --model " + model + " 0x6001");
    CHECK(classify.exit_code == 3);
    CHECK(classify.output.find("SchemaMismatch") != std::string::npos);

    // supplying the account features makes the same call succeed
    std::ofstream(dir.file("account.json"))
        << R"({"balance":"1000","nonce":2,"txs":[{"t":100,"dir":"in","value":"5","addr":"0xaa"}]})";
    ProcessResult with_account = run_process(kBin + " classify --model " + model + " --account " +
                                             dir.file("account.json") + " 0x6001");
    CHECK(with_account.exit_code == 0);
    CHECK(with_account.output.find("category:") != std::string::npos);
}

TEST_CASE("crossval writes identical reports for identical config") {
    TempDir dir;
    std::string corpus = make_corpus(dir, 10, 4);
    std::string cmd = kBin + " crossval --corpus " + corpus +
                      " --algorithm c45 --folds 3 --seed 11 --max-depth 6 --report ";
    ProcessResult a = run_process(cmd + dir.file("a.json"));
    ProcessResult b = run_process(cmd + dir.file("b.json"));
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(read_text_file(dir.file("a.json")) == read_text_file(dir.file("b.json")));

    nlohmann::json report = nlohmann::json::parse(read_text_file(dir.file("a.json")));
    CHECK(report["config"]["seed"] == 11);
    CHECK(report["per_fold"].size() == 3);
    CHECK(report["pooled"]["accuracy"].get<double>() > 0.8);
}

TEST_CASE("crossval rejects a single fold with exit 2") {
    TempDir dir;
    std::string corpus = make_corpus(dir, 5, 5);
    ProcessResult r = run_process(kBin + " crossval --corpus " + corpus +
                                  " --algorithm c45 --folds 1 --seed 1");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("BadFoldCount") != std::string::npos);
}

TEST_CASE("crossval warns when classes are smaller than the fold count") {
    TempDir dir;
    std::string corpus = make_corpus(dir, 4, 6);
    ProcessResult r = run_process(kBin + " crossval --corpus " + corpus +
                                  " --algorithm c45 --folds 10 --seed 1 --report " +
                                  dir.file("r.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("warning:") != std::string::npos);
}

TEST_CASE("classify refuses custom-schema models with exit 3") {
    TempDir dir;
    std::ofstream(dir.file("toy.csv")) << "f0,f1,label\n0,1,a\n1,0,b\n2,1,a\n3,0,b\n";
    std::string model = dir.file("custom.json");
    ProcessResult train = run_process(kBin + " train --corpus " + dir.file("toy.csv") +
                                      " --algorithm c45 --seed 1 --model-out " + model);
    REQUIRE(train.exit_code == 0);
    ProcessResult classify = run_process(kBin + " classify --model " + model + " 0x6001");
    CHECK(classify.exit_code == 3);
}

TEST_CASE("normalize runs from the command line") {
    TempDir dir;
    std::filesystem::create_directory(dir.path() / "hexdir");
    std::ofstream(dir.path() / "hexdir" / "0xab_token.hex") << "0x6001";
    ProcessResult r = run_process(kBin + " normalize --input " + (dir.path() / "hexdir").string() +
                                  " --output " + dir.file("norm.jsonl"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("normalized 1 record(s)") != std::string::npos);
}

TEST_CASE("bpso training reports the selected features") {
    TempDir dir;
    std::string corpus = make_corpus(dir, 6, 7);
    std::string model = dir.file("bpso_model.json");
    std::string report = dir.file("bpso_report.json");
    ProcessResult r = run_process(kBin + " train --corpus " + corpus +
                                  " --algorithm bpso-adaboost --seed 3 --rounds 3 --swarm 4" +
                                  " --generations 2 --inner-folds 2 --max-depth 3 --model-out " +
                                  model + " --report " + report);
    REQUIRE(r.exit_code == 0);
    nlohmann::json doc = nlohmann::json::parse(read_text_file(report));
    CHECK(doc["bpso"]["s_best"].is_array());
    CHECK(doc["bpso"]["s_best"].size() >= 1);
    CHECK(doc["bpso"]["history"].size() >= 1);

    nlohmann::json model_doc = nlohmann::json::parse(read_text_file(model));
    CHECK(model_doc["selected_features"].size() == doc["bpso"]["s_best"].size());
}
