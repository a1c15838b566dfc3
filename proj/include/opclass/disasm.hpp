#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opclass/errors.hpp"

namespace opclass {

// One entry of the EVM opcode table. `family` is the mnemonic with the
// numeric suffix stripped for PUSH/DUP/SWAP/LOG (PUSH7 -> PUSH, ADD -> ADD).
struct OpcodeSpec {
    std::uint8_t value = 0;
    const char* mnemonic = "INVALID";
    unsigned immediate_len = 0;  // bytes consumed after the opcode; PUSHn only
    const char* family = "INVALID";
};

// Total lookup: unassigned byte values come back as an INVALID spec carrying
// the original byte value, so re-serialization reproduces the input.
const OpcodeSpec& opcode_lookup(std::uint8_t value);

// Mnemonics assigned by the opcode table, 0xfe INVALID included, in
// ascending opcode-value order. One entry per assigned value.
const std::vector<OpcodeSpec>& opcode_table();

enum class BytecodeSource { HexFile, JsonlRecord, Rpc };

struct Bytecode {
    std::vector<std::uint8_t> bytes;
    BytecodeSource source = BytecodeSource::HexFile;
};

struct Instruction {
    std::size_t offset = 0;
    OpcodeSpec spec;
    std::vector<std::uint8_t> immediate;
    bool truncated = false;  // code ended before the PUSH immediate completed
};

// Decodes hex text: optional 0x/0X prefix, case-insensitive digits,
// surrounding whitespace tolerated. Throws OddLength or NonHexCharacter
// (message reports the byte position within the input text).
Bytecode parse_hex(const std::string& text, BytecodeSource source = BytecodeSource::HexFile);

// Linear scan from offset 0. Never fails: unknown bytes decode as INVALID
// instructions and a PUSH cut short by end of code is emitted with
// truncated=true and the bytes that were present.
std::vector<Instruction> disassemble(const Bytecode& code);

// Inverse of disassemble: opcode byte + immediate, concatenated.
std::vector<std::uint8_t> reassemble(const std::vector<Instruction>& instructions);

// `<offset-hex>: <MNEMONIC> [0x<immediate-hex>]`, one instruction per line.
std::string to_listing(const std::vector<Instruction>& instructions);

}  // namespace opclass
