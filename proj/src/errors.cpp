#include "opclass/errors.hpp"

namespace opclass {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::OddLength: return "OddLength";
        case ErrorKind::NonHexCharacter: return "NonHexCharacter";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::EmptyClass: return "EmptyClass";
        case ErrorKind::BadFoldCount: return "BadFoldCount";
        case ErrorKind::SchemaHeaderMismatch: return "SchemaHeaderMismatch";
        case ErrorKind::UnknownLabel: return "UnknownLabel";
        case ErrorKind::RaggedRow: return "RaggedRow";
        case ErrorKind::CorpusFormat: return "CorpusFormat";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::AllWeightsZero: return "AllWeightsZero";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::EpsilonOutOfRange: return "EpsilonOutOfRange";
        case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
        case ErrorKind::FirstRoundTooWeak: return "FirstRoundTooWeak";
        case ErrorKind::MaskEmpty: return "MaskEmpty";
        case ErrorKind::MissingClass: return "MissingClass";
        case ErrorKind::EmptySet: return "EmptySet";
        case ErrorKind::BadAddress: return "BadAddress";
        case ErrorKind::RpcTransport: return "RpcTransport";
        case ErrorKind::RpcError: return "RpcError";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::NoRecords: return "NoRecords";
        case ErrorKind::BadConfig: return "BadConfig";
    }
    return "Unknown";
}

}  // namespace opclass
