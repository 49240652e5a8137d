#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hjstab {

enum class ErrorCode {
    NonFiniteDerivative,
    AssumptionAViolated,
    QuadratureDivergence,
    PeriodMismatch,
    EpsOutOfRange,
    RegimeMismatch,
    MuNotNegative,
    OutsideValidWindow,
    SignViolation,
    CFLViolation,
    BlowUp,
    NonFinite,
    DegenerateWindow,
    NoConvergence,
    Trivialized,
    PreconditionFailed,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is stable
/// and is what callers (and the CLI exit-code mapping) should switch on.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonFiniteDerivative: return "NonFiniteDerivative";
        case ErrorCode::AssumptionAViolated: return "AssumptionAViolated";
        case ErrorCode::QuadratureDivergence: return "QuadratureDivergence";
        case ErrorCode::PeriodMismatch: return "PeriodMismatch";
        case ErrorCode::EpsOutOfRange: return "EpsOutOfRange";
        case ErrorCode::RegimeMismatch: return "RegimeMismatch";
        case ErrorCode::MuNotNegative: return "MuNotNegative";
        case ErrorCode::OutsideValidWindow: return "OutsideValidWindow";
        case ErrorCode::SignViolation: return "SignViolation";
        case ErrorCode::CFLViolation: return "CFLViolation";
        case ErrorCode::BlowUp: return "BlowUp";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::DegenerateWindow: return "DegenerateWindow";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::Trivialized: return "Trivialized";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace hjstab
