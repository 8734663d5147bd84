#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lagfib {

enum class ErrorCode {
    DivisionByZero,
    ContextMismatch,
    Overflow,
    ParseError,
    NotUnimodular,
    NotAntisymmetric,
    WrongCorank,
    NotSaturated,
    HypothesesNotMet,
    DoesNotPreserveForm,
    OnDiscriminant,
    NotOnDiscriminant,
    OnAxis,
    InvalidArgument,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorCode::WrongCorank: return "WrongCorank";
    case ErrorCode::NotSaturated: return "NotSaturated";
    case ErrorCode::HypothesesNotMet: return "HypothesesNotMet";
    case ErrorCode::DoesNotPreserveForm: return "DoesNotPreserveForm";
    case ErrorCode::OnDiscriminant: return "OnDiscriminant";
    case ErrorCode::NotOnDiscriminant: return "NotOnDiscriminant";
    case ErrorCode::OnAxis: return "OnAxis";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure in the library is reported through this type; `code()`
/// distinguishes the cases callers are expected to branch on.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace lagfib
