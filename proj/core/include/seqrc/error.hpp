#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seqrc {

enum class ErrorCode {
    InvalidSpec,
    DimensionMismatch,
    EstimatedRadiusZero,
    SeriesTooShort,
    WarmupTooShort,
    SingularNormalMatrix,
    NonFiniteState,
    NonFiniteValue,
    CflViolation,
    IoError,
    FormatVersionMismatch,
    ChecksumMismatch,
    ParseError,
    UnknownKey,
    MissingRequired,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type for every failure raised by the library. The code is the
/// machine-readable part; what() carries the human diagnostic.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Process exit status for a failure class: 2 config, 3 numeric, 4 I/O.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace seqrc
