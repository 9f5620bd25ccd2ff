#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hjc {

enum class ErrorCode {
    InvalidArgument,
    UnknownFamily,
    ParamOutOfRange,
    NegativeI,
    Saturated,
    OutOfDomain,
    NotDiagonallyDominant,
    SingularPivot,
    BracketInvalid,
    OverflowDetected,
    CflViolation,
    MonotonicityViolated,
    InfeasibleLow,
    SaturatedHigh,
    PreconditionFailed,
    HorizonMismatch,
    LeftDomain,
    NoHit,
    ConfigInvalid,
    InputMismatch,
    IoError,
};

inline constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::UnknownFamily: return "UnknownFamily";
        case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
        case ErrorCode::NegativeI: return "NegativeI";
        case ErrorCode::Saturated: return "Saturated";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NotDiagonallyDominant: return "NotDiagonallyDominant";
        case ErrorCode::SingularPivot: return "SingularPivot";
        case ErrorCode::BracketInvalid: return "BracketInvalid";
        case ErrorCode::OverflowDetected: return "OverflowDetected";
        case ErrorCode::CflViolation: return "CflViolation";
        case ErrorCode::MonotonicityViolated: return "MonotonicityViolated";
        case ErrorCode::InfeasibleLow: return "InfeasibleLow";
        case ErrorCode::SaturatedHigh: return "SaturatedHigh";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::HorizonMismatch: return "HorizonMismatch";
        case ErrorCode::LeftDomain: return "LeftDomain";
        case ErrorCode::NoHit: return "NoHit";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::InputMismatch: return "InputMismatch";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Why a time-stepping run stopped early; its partial output is kept.
struct RunFailure {
    ErrorCode code = ErrorCode::InvalidArgument;
    std::string message;
    std::size_t step = 0;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace hjc
