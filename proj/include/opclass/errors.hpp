#pragma once

#include <stdexcept>
#include <string>

namespace opclass {

enum class ErrorKind {
    OddLength,
    NonHexCharacter,
    SchemaMismatch,
    EmptyClass,
    BadFoldCount,
    SchemaHeaderMismatch,
    UnknownLabel,
    RaggedRow,
    CorpusFormat,
    EmptyDataset,
    AllWeightsZero,
    LengthMismatch,
    EpsilonOutOfRange,
    DegenerateDistribution,
    FirstRoundTooWeak,
    MaskEmpty,
    MissingClass,
    EmptySet,
    BadAddress,
    RpcTransport,
    RpcError,
    IoError,
    NoRecords,
    BadConfig,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace opclass
