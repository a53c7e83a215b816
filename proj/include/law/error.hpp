#pragma once

#include <stdexcept>
#include <string>

namespace law {

enum class ErrorCode {
    // corpus / persistence
    MalformedRecord,
    DuplicateDocId,
    MissingBodyFile,
    InvalidUtf8,
    InsufficientHistory,
    SchemaVersionMismatch,
    IoError,
    // stylometry
    EmptyDocument,
    TooFewVectors,
    SchemaMismatch,
    DimensionMismatch,
    // attribution
    MissingTitle,
    MissingAbstract,
    FixtureMissing,
    ApiError,
    EmptyCompletion,
    // metrics
    LengthMismatch,
    EmptyGrid,
    DegenerateTable,
    OutOfRange,
    RaggedTable,
    // general
    InvalidArgument,
};

const char* to_string(ErrorCode code);

/// All recoverable failures are thrown as Error; code() identifies the
/// contract that was violated, what() carries the specifics.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace law
