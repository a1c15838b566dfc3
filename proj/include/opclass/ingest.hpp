#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "opclass/disasm.hpp"

namespace opclass {

struct RpcEndpoint {
    std::string url;  // e.g. http://127.0.0.1:8545 or https://host/path
    double timeout_seconds = 10.0;
    int max_retries = 2;  // additional attempts after the first
};

bool is_eth_address(const std::string& address);

// The exact JSON-RPC 2.0 request body sent on the wire:
//   {"jsonrpc":"2.0","id":<n>,"method":"eth_getCode","params":["<address>","latest"]}
std::string build_get_code_request(const std::string& address, std::uint64_t id);

// POSTs eth_getCode for the address at block "latest". A "0x" result is an
// externally-owned account and comes back as empty bytecode. Transport
// failures retry up to max_retries with fresh request ids; a node-reported
// error becomes RpcError immediately.
Bytecode fetch_code(const RpcEndpoint& endpoint, const std::string& address);

// Converts a corpus into the canonical JSONL form and returns the number of
// records written. Input is either a JSONL file or a directory of
// `<address>_<category>.hex` files. Records whose bytecode does not parse are
// skipped and logged. NoRecords if nothing was emitted.
std::size_t normalize_corpus(const std::string& input_path, const std::string& output_path,
                             std::ostream& log);
std::size_t normalize_corpus(const std::string& input_path, const std::string& output_path);

std::string read_text_file(const std::string& path);

}  // namespace opclass
