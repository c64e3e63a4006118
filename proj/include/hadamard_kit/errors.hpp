#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hadamard_kit {

enum class ErrorKind {
    UndefinedProduct,
    IndeterminateProduct,
    UnrepresentableSet,
    PointOnCycle,
    NotStronglyConvolvable,
    PointInProduct,
    TableCaseImpossible,
    NoMargin,
    SynthesisFailed,
    InvalidSpec,
    ParseError,
    RejectedExpression,
    SingularPoint,
    BranchCut,
    UnknownBuiltin,
    CircleMeetsSingularSet,
    NoLimit,
    InfinityInSingularSet,
    InvalidFunctionDef,
    IntegrandFailure,
    ToleranceNotMet,
    VanishingAtInfinityViolated,
    GridOutsideWindow,
    PreconditionViolated,
    ConfigError,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::UndefinedProduct: return "UndefinedProduct";
        case ErrorKind::IndeterminateProduct: return "IndeterminateProduct";
        case ErrorKind::UnrepresentableSet: return "UnrepresentableSet";
        case ErrorKind::PointOnCycle: return "PointOnCycle";
        case ErrorKind::NotStronglyConvolvable: return "NotStronglyConvolvable";
        case ErrorKind::PointInProduct: return "PointInProduct";
        case ErrorKind::TableCaseImpossible: return "TableCaseImpossible";
        case ErrorKind::NoMargin: return "NoMargin";
        case ErrorKind::SynthesisFailed: return "SynthesisFailed";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::RejectedExpression: return "RejectedExpression";
        case ErrorKind::SingularPoint: return "SingularPoint";
        case ErrorKind::BranchCut: return "BranchCut";
        case ErrorKind::UnknownBuiltin: return "UnknownBuiltin";
        case ErrorKind::CircleMeetsSingularSet: return "CircleMeetsSingularSet";
        case ErrorKind::NoLimit: return "NoLimit";
        case ErrorKind::InfinityInSingularSet: return "InfinityInSingularSet";
        case ErrorKind::InvalidFunctionDef: return "InvalidFunctionDef";
        case ErrorKind::IntegrandFailure: return "IntegrandFailure";
        case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
        case ErrorKind::VanishingAtInfinityViolated: return "VanishingAtInfinityViolated";
        case ErrorKind::GridOutsideWindow: return "GridOutsideWindow";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Numeric failures (as opposed to domain/config errors) map to a distinct CLI exit code.
inline bool is_numeric_failure(ErrorKind kind) {
    return kind == ErrorKind::SynthesisFailed || kind == ErrorKind::ToleranceNotMet ||
           kind == ErrorKind::NoLimit || kind == ErrorKind::IntegrandFailure;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Parse failure with the byte offset and the set of tokens that would have been accepted.
class ParseError : public Error {
public:
    ParseError(std::size_t position, std::vector<std::string> expected, const std::string& message)
        : Error(ErrorKind::ParseError, message + " at offset " + std::to_string(position)),
          position_(position), expected_(std::move(expected)) {}

    std::size_t position() const noexcept { return position_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::vector<std::string> expected_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace hadamard_kit
