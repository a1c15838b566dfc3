#include "opclass/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace opclass {

bool is_eth_address(const std::string& address) {
    if (address.size() != 42 || address[0] != '0' || address[1] != 'x') return false;
    return std::all_of(address.begin() + 2, address.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
    });
}

std::string build_get_code_request(const std::string& address, std::uint64_t id) {
    return "{\"jsonrpc\":\"2.0\",\"id\":" + std::to_string(id) +
           ",\"method\":\"eth_getCode\",\"params\":[\"" + address + "\",\"latest\"]}";
}

namespace {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // leading slash, "/" if absent
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

Bytecode fetch_code(const RpcEndpoint& endpoint, const std::string& address) {
    if (!is_eth_address(address))
        throw_error(ErrorKind::BadAddress, "'" + address + "' is not a 20-byte hex address");

    SplitUrl url = split_url(endpoint.url);
    httplib::Client client(url.base);
    auto seconds = static_cast<time_t>(endpoint.timeout_seconds);
    auto micros = static_cast<time_t>((endpoint.timeout_seconds - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);

    std::string last_failure = "no attempt made";
    std::uint64_t id = 0;
    for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
        ++id;  // retries never reuse a request id
        auto res = client.Post(url.path, build_get_code_request(address, id), "application/json");
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_failure = "HTTP status " + std::to_string(res->status);
            continue;
        }

        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            last_failure = std::string("unparseable response: ") + e.what();
            continue;
        }
        if (doc.contains("error")) {
            const auto& err = doc["error"];
            throw_error(ErrorKind::RpcError,
                        "node error " + err.value("code", nlohmann::json(0)).dump() + ": " +
                            err.value("message", "unknown"));
        }
        if (doc.value("id", std::uint64_t{0}) != id) {
            last_failure = "response id does not match request id";
            continue;
        }
        if (!doc.contains("result") || !doc["result"].is_string()) {
            last_failure = "response lacks a string result";
            continue;
        }
        return parse_hex(doc["result"].get<std::string>(), BytecodeSource::Rpc);
    }
    throw_error(ErrorKind::RpcTransport, "eth_getCode to " + endpoint.url + " failed after " +
                                             std::to_string(endpoint.max_retries + 1) +
                                             " attempts; last: " + last_failure);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::string to_hex_string(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out = "0x";
    for (std::uint8_t b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0xf];
    }
    return out;
}

nlohmann::ordered_json canonical_record(const std::string& address, const Bytecode& code,
                                        const std::string& category, const std::string& balance,
                                        std::int64_t nonce, const nlohmann::json& txs) {
    nlohmann::ordered_json rec;
    rec["address"] = address;
    rec["bytecode"] = to_hex_string(code.bytes);
    rec["category"] = category;
    rec["balance"] = balance;
    rec["nonce"] = nonce;
    nlohmann::ordered_json out_txs = nlohmann::ordered_json::array();
    for (const auto& tx : txs) {
        nlohmann::ordered_json t;
        t["t"] = tx.at("t");
        t["dir"] = tx.at("dir");
        t["value"] = tx.at("value");
        t["addr"] = tx.value("addr", "");
        out_txs.push_back(std::move(t));
    }
    rec["txs"] = std::move(out_txs);
    return rec;
}

std::size_t normalize_directory(const std::string& input_path, std::ofstream& out,
                                std::ostream& log) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(input_path))
        if (entry.is_regular_file() && entry.path().extension() == ".hex")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::size_t count = 0;
    for (const auto& file : files) {
        std::string stem = file.stem().string();
        auto sep = stem.find('_');
        if (sep == std::string::npos || sep == 0 || sep + 1 >= stem.size()) {
            log << "skip " << file.string() << ": name is not <address>_<category>.hex\n";
            continue;
        }
        std::string address = stem.substr(0, sep);
        std::string category = stem.substr(sep + 1);
        Bytecode code;
        try {
            code = parse_hex(read_text_file(file.string()), BytecodeSource::HexFile);
        } catch (const Error& e) {
            log << "skip " << file.string() << ": " << e.what() << '\n';
            continue;
        }
        out << canonical_record(address, code, category, "0", 0, nlohmann::json::array()).dump()
            << '\n';
        ++count;
    }
    return count;
}

std::size_t normalize_jsonl(const std::string& input_path, std::ofstream& out, std::ostream& log) {
    std::ifstream in(input_path);
    if (!in) throw_error(ErrorKind::IoError, "cannot open " + input_path);

    std::size_t count = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            log << "skip line " << line_no << ": " << e.what() << '\n';
            continue;
        }
        if (!rec.contains("address") || !rec.contains("bytecode") || !rec.contains("category")) {
            log << "skip line " << line_no << ": missing address/bytecode/category\n";
            continue;
        }
        Bytecode code;
        try {
            code = parse_hex(rec["bytecode"].get<std::string>(), BytecodeSource::JsonlRecord);
        } catch (const Error& e) {
            log << "skip line " << line_no << ": " << e.what() << '\n';
            continue;
        }
        out << canonical_record(rec["address"].get<std::string>(), code,
                                rec["category"].get<std::string>(), rec.value("balance", "0"),
                                rec.value("nonce", std::int64_t{0}),
                                rec.value("txs", nlohmann::json::array()))
                   .dump()
            << '\n';
        ++count;
    }
    return count;
}

}  // namespace

std::size_t normalize_corpus(const std::string& input_path, const std::string& output_path,
                             std::ostream& log) {
    std::ofstream out(output_path);
    if (!out) throw_error(ErrorKind::IoError, "cannot write " + output_path);

    std::size_t count = std::filesystem::is_directory(input_path)
                            ? normalize_directory(input_path, out, log)
                            : normalize_jsonl(input_path, out, log);
    if (!out) throw_error(ErrorKind::IoError, "write to " + output_path + " failed");
    if (count == 0) throw_error(ErrorKind::NoRecords, "no records emitted from " + input_path);
    return count;
}

std::size_t normalize_corpus(const std::string& input_path, const std::string& output_path) {
    return normalize_corpus(input_path, output_path, std::cerr);
}

}  // namespace opclass
