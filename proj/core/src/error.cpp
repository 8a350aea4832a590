#include "seqrc/error.hpp"

namespace seqrc {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EstimatedRadiusZero: return "EstimatedRadiusZero";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::WarmupTooShort: return "WarmupTooShort";
    case ErrorCode::SingularNormalMatrix: return "SingularNormalMatrix";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::MissingRequired: return "MissingRequired";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

int exit_code_for(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::ParseError:
    case ErrorCode::UnknownKey:
    case ErrorCode::MissingRequired:
        return 2;
    case ErrorCode::IoError:
    case ErrorCode::FormatVersionMismatch:
    case ErrorCode::ChecksumMismatch:
    case ErrorCode::NonFiniteValue:
        return 4;
    default:
        return 3;
    }
}

}  // namespace seqrc
