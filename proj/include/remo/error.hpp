#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace remo {

enum class ErrorCode {
    EvenModulus,
    NotPrime,
    NoRootOfUnity,
    BadWordSize,
    BadTransformSize,
    UnsupportedWidth,
    UnknownPreset,
    UnknownVariant,
    OperandTooWide,
    EtaTooLarge,
    InvalidConfig,
    ParseError,
};

inline std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::EvenModulus: return "EvenModulus";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::NoRootOfUnity: return "NoRootOfUnity";
    case ErrorCode::BadWordSize: return "BadWordSize";
    case ErrorCode::BadTransformSize: return "BadTransformSize";
    case ErrorCode::UnsupportedWidth: return "UnsupportedWidth";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::UnknownVariant: return "UnknownVariant";
    case ErrorCode::OperandTooWide: return "OperandTooWide";
    case ErrorCode::EtaTooLarge: return "EtaTooLarge";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Thrown for violated preconditions and invalid configuration.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Thrown when an internal arithmetic invariant breaks (never on valid input).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace remo
