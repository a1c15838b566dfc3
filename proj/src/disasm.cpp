#include "opclass/disasm.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace opclass {

namespace {

struct TableEntry {
    std::uint8_t value;
    const char* mnemonic;
    unsigned immediate_len;
    const char* family;
};

// Yellow Paper opcode table as of the Istanbul fork: no PUSH0 (0x5f), no
// post-2020 additions. Later forks can be appended behind a version tag.
constexpr TableEntry kAssigned[] = {
    {0x00, "STOP", 0, "STOP"},
    {0x01, "ADD", 0, "ADD"},
    {0x02, "MUL", 0, "MUL"},
    {0x03, "SUB", 0, "SUB"},
    {0x04, "DIV", 0, "DIV"},
    {0x05, "SDIV", 0, "SDIV"},
    {0x06, "MOD", 0, "MOD"},
    {0x07, "SMOD", 0, "SMOD"},
    {0x08, "ADDMOD", 0, "ADDMOD"},
    {0x09, "MULMOD", 0, "MULMOD"},
    {0x0a, "EXP", 0, "EXP"},
    {0x0b, "SIGNEXTEND", 0, "SIGNEXTEND"},
    {0x10, "LT", 0, "LT"},
    {0x11, "GT", 0, "GT"},
    {0x12, "SLT", 0, "SLT"},
    {0x13, "SGT", 0, "SGT"},
    {0x14, "EQ", 0, "EQ"},
    {0x15, "ISZERO", 0, "ISZERO"},
    {0x16, "AND", 0, "AND"},
    {0x17, "OR", 0, "OR"},
    {0x18, "XOR", 0, "XOR"},
    {0x19, "NOT", 0, "NOT"},
    {0x1a, "BYTE", 0, "BYTE"},
    {0x1b, "SHL", 0, "SHL"},
    {0x1c, "SHR", 0, "SHR"},
    {0x1d, "SAR", 0, "SAR"},
    {0x20, "KECCAK256", 0, "KECCAK256"},
    {0x30, "ADDRESS", 0, "ADDRESS"},
    {0x31, "BALANCE", 0, "BALANCE"},
    {0x32, "ORIGIN", 0, "ORIGIN"},
    {0x33, "CALLER", 0, "CALLER"},
    {0x34, "CALLVALUE", 0, "CALLVALUE"},
    {0x35, "CALLDATALOAD", 0, "CALLDATALOAD"},
    {0x36, "CALLDATASIZE", 0, "CALLDATASIZE"},
    {0x37, "CALLDATACOPY", 0, "CALLDATACOPY"},
    {0x38, "CODESIZE", 0, "CODESIZE"},
    {0x39, "CODECOPY", 0, "CODECOPY"},
    {0x3a, "GASPRICE", 0, "GASPRICE"},
    {0x3b, "EXTCODESIZE", 0, "EXTCODESIZE"},
    {0x3c, "EXTCODECOPY", 0, "EXTCODECOPY"},
    {0x3d, "RETURNDATASIZE", 0, "RETURNDATASIZE"},
    {0x3e, "RETURNDATACOPY", 0, "RETURNDATACOPY"},
    {0x3f, "EXTCODEHASH", 0, "EXTCODEHASH"},
    {0x40, "BLOCKHASH", 0, "BLOCKHASH"},
    {0x41, "COINBASE", 0, "COINBASE"},
    {0x42, "TIMESTAMP", 0, "TIMESTAMP"},
    {0x43, "NUMBER", 0, "NUMBER"},
    {0x44, "DIFFICULTY", 0, "DIFFICULTY"},
    {0x45, "GASLIMIT", 0, "GASLIMIT"},
    {0x46, "CHAINID", 0, "CHAINID"},
    {0x47, "SELFBALANCE", 0, "SELFBALANCE"},
    {0x50, "POP", 0, "POP"},
    {0x51, "MLOAD", 0, "MLOAD"},
    {0x52, "MSTORE", 0, "MSTORE"},
    {0x53, "MSTORE8", 0, "MSTORE8"},
    {0x54, "SLOAD", 0, "SLOAD"},
    {0x55, "SSTORE", 0, "SSTORE"},
    {0x56, "JUMP", 0, "JUMP"},
    {0x57, "JUMPI", 0, "JUMPI"},
    {0x58, "PC", 0, "PC"},
    {0x59, "MSIZE", 0, "MSIZE"},
    {0x5a, "GAS", 0, "GAS"},
    {0x5b, "JUMPDEST", 0, "JUMPDEST"},
    {0x60, "PUSH1", 1, "PUSH"},
    {0x61, "PUSH2", 2, "PUSH"},
    {0x62, "PUSH3", 3, "PUSH"},
    {0x63, "PUSH4", 4, "PUSH"},
    {0x64, "PUSH5", 5, "PUSH"},
    {0x65, "PUSH6", 6, "PUSH"},
    {0x66, "PUSH7", 7, "PUSH"},
    {0x67, "PUSH8", 8, "PUSH"},
    {0x68, "PUSH9", 9, "PUSH"},
    {0x69, "PUSH10", 10, "PUSH"},
    {0x6a, "PUSH11", 11, "PUSH"},
    {0x6b, "PUSH12", 12, "PUSH"},
    {0x6c, "PUSH13", 13, "PUSH"},
    {0x6d, "PUSH14", 14, "PUSH"},
    {0x6e, "PUSH15", 15, "PUSH"},
    {0x6f, "PUSH16", 16, "PUSH"},
    {0x70, "PUSH17", 17, "PUSH"},
    {0x71, "PUSH18", 18, "PUSH"},
    {0x72, "PUSH19", 19, "PUSH"},
    {0x73, "PUSH20", 20, "PUSH"},
    {0x74, "PUSH21", 21, "PUSH"},
    {0x75, "PUSH22", 22, "PUSH"},
    {0x76, "PUSH23", 23, "PUSH"},
    {0x77, "PUSH24", 24, "PUSH"},
    {0x78, "PUSH25", 25, "PUSH"},
    {0x79, "PUSH26", 26, "PUSH"},
    {0x7a, "PUSH27", 27, "PUSH"},
    {0x7b, "PUSH28", 28, "PUSH"},
    {0x7c, "PUSH29", 29, "PUSH"},
    {0x7d, "PUSH30", 30, "PUSH"},
    {0x7e, "PUSH31", 31, "PUSH"},
    {0x7f, "PUSH32", 32, "PUSH"},
    {0x80, "DUP1", 0, "DUP"},
    {0x81, "DUP2", 0, "DUP"},
    {0x82, "DUP3", 0, "DUP"},
    {0x83, "DUP4", 0, "DUP"},
    {0x84, "DUP5", 0, "DUP"},
    {0x85, "DUP6", 0, "DUP"},
    {0x86, "DUP7", 0, "DUP"},
    {0x87, "DUP8", 0, "DUP"},
    {0x88, "DUP9", 0, "DUP"},
    {0x89, "DUP10", 0, "DUP"},
    {0x8a, "DUP11", 0, "DUP"},
    {0x8b, "DUP12", 0, "DUP"},
    {0x8c, "DUP13", 0, "DUP"},
    {0x8d, "DUP14", 0, "DUP"},
    {0x8e, "DUP15", 0, "DUP"},
    {0x8f, "DUP16", 0, "DUP"},
    {0x90, "SWAP1", 0, "SWAP"},
    {0x91, "SWAP2", 0, "SWAP"},
    {0x92, "SWAP3", 0, "SWAP"},
    {0x93, "SWAP4", 0, "SWAP"},
    {0x94, "SWAP5", 0, "SWAP"},
    {0x95, "SWAP6", 0, "SWAP"},
    {0x96, "SWAP7", 0, "SWAP"},
    {0x97, "SWAP8", 0, "SWAP"},
    {0x98, "SWAP9", 0, "SWAP"},
    {0x99, "SWAP10", 0, "SWAP"},
    {0x9a, "SWAP11", 0, "SWAP"},
    {0x9b, "SWAP12", 0, "SWAP"},
    {0x9c, "SWAP13", 0, "SWAP"},
    {0x9d, "SWAP14", 0, "SWAP"},
    {0x9e, "SWAP15", 0, "SWAP"},
    {0x9f, "SWAP16", 0, "SWAP"},
    {0xa0, "LOG0", 0, "LOG"},
    {0xa1, "LOG1", 0, "LOG"},
    {0xa2, "LOG2", 0, "LOG"},
    {0xa3, "LOG3", 0, "LOG"},
    {0xa4, "LOG4", 0, "LOG"},
    {0xf0, "CREATE", 0, "CREATE"},
    {0xf1, "CALL", 0, "CALL"},
    {0xf2, "CALLCODE", 0, "CALLCODE"},
    {0xf3, "RETURN", 0, "RETURN"},
    {0xf4, "DELEGATECALL", 0, "DELEGATECALL"},
    {0xf5, "CREATE2", 0, "CREATE2"},
    {0xfa, "STATICCALL", 0, "STATICCALL"},
    {0xfd, "REVERT", 0, "REVERT"},
    {0xfe, "INVALID", 0, "INVALID"},
    {0xff, "SELFDESTRUCT", 0, "SELFDESTRUCT"},
};

std::array<OpcodeSpec, 256> build_full_table() {
    std::array<OpcodeSpec, 256> table{};
    for (int v = 0; v < 256; ++v) {
        table[v] = OpcodeSpec{static_cast<std::uint8_t>(v), "INVALID", 0, "INVALID"};
    }
    for (const TableEntry& e : kAssigned) {
        table[e.value] = OpcodeSpec{e.value, e.mnemonic, e.immediate_len, e.family};
    }
    return table;
}

const std::array<OpcodeSpec, 256>& full_table() {
    static const std::array<OpcodeSpec, 256> table = build_full_table();
    return table;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

const OpcodeSpec& opcode_lookup(std::uint8_t value) {
    return full_table()[value];
}

const std::vector<OpcodeSpec>& opcode_table() {
    static const std::vector<OpcodeSpec> assigned = [] {
        std::vector<OpcodeSpec> out;
        out.reserve(std::size(kAssigned));
        for (const TableEntry& e : kAssigned)
            out.push_back(OpcodeSpec{e.value, e.mnemonic, e.immediate_len, e.family});
        return out;
    }();
    return assigned;
}

Bytecode parse_hex(const std::string& text, BytecodeSource source) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (end - begin >= 2 && text[begin] == '0' && (text[begin + 1] == 'x' || text[begin + 1] == 'X'))
        begin += 2;

    std::size_t digits = end - begin;
    if (digits % 2 != 0)
        throw_error(ErrorKind::OddLength,
                    "hex input has " + std::to_string(digits) + " digits (odd)");

    Bytecode code;
    code.source = source;
    code.bytes.reserve(digits / 2);
    for (std::size_t i = begin; i < end; i += 2) {
        int hi = hex_digit(text[i]);
        int lo = hex_digit(text[i + 1]);
        std::size_t bad = hi < 0 ? i : i + 1;
        if (hi < 0 || lo < 0)
            throw_error(ErrorKind::NonHexCharacter,
                        std::string("'") + text[bad] + "' at position " + std::to_string(bad));
        code.bytes.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return code;
}

std::vector<Instruction> disassemble(const Bytecode& code) {
    std::vector<Instruction> out;
    const auto& bytes = code.bytes;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        Instruction ins;
        ins.offset = pos;
        ins.spec = opcode_lookup(bytes[pos]);
        ++pos;
        std::size_t want = ins.spec.immediate_len;
        std::size_t have = std::min<std::size_t>(want, bytes.size() - pos);
        ins.immediate.assign(bytes.begin() + pos, bytes.begin() + pos + have);
        ins.truncated = have < want;
        pos += have;
        out.push_back(std::move(ins));
    }
    return out;
}

std::vector<std::uint8_t> reassemble(const std::vector<Instruction>& instructions) {
    std::vector<std::uint8_t> bytes;
    for (const Instruction& ins : instructions) {
        bytes.push_back(ins.spec.value);
        bytes.insert(bytes.end(), ins.immediate.begin(), ins.immediate.end());
    }
    return bytes;
}

std::string to_listing(const std::vector<Instruction>& instructions) {
    std::string out;
    char buf[16];
    for (const Instruction& ins : instructions) {
        std::snprintf(buf, sizeof buf, "%04zx", ins.offset);
        out += buf;
        out += ": ";
        out += ins.spec.mnemonic;
        if (!ins.immediate.empty()) {
            out += " 0x";
            for (std::uint8_t b : ins.immediate) {
                std::snprintf(buf, sizeof buf, "%02x", b);
                out += buf;
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace opclass
