#include "law/error.hpp"

namespace law {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateDocId: return "DuplicateDocId";
    case ErrorCode::MissingBodyFile: return "MissingBodyFile";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::TooFewVectors: return "TooFewVectors";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingTitle: return "MissingTitle";
    case ErrorCode::MissingAbstract: return "MissingAbstract";
    case ErrorCode::FixtureMissing: return "FixtureMissing";
    case ErrorCode::ApiError: return "ApiError";
    case ErrorCode::EmptyCompletion: return "EmptyCompletion";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::RaggedTable: return "RaggedTable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

} // namespace law
