#pragma once
// Typed error hierarchy shared by every module. Each failure carries a kind
// (stable identity for tests and exit-code mapping) plus a human message that
// always names the offending location: line, key, instance id or class.

#include <stdexcept>
#include <string>
#include <string_view>

namespace camo {

enum class ErrorKind {
    // record validation
    UnknownLabel,
    DuplicateModel,
    BadDistribution,
    EmptyEnsemble,
    // engine / strategies
    NotMinorityClass,
    MissingPriors,
    MissingDistribution,
    NoGoldLabels,
    InconsistentM,
    UnfittedMeta,
    // metrics
    MissingLenientMap,
    MissingGold,
    // io / config
    ParseError,
    ValidationError,
    InconsistentEnsembleSize,
    UnknownKey,
    InvariantViolation,
    IoError,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnknownLabel: return "UnknownLabel";
        case ErrorKind::DuplicateModel: return "DuplicateModel";
        case ErrorKind::BadDistribution: return "BadDistribution";
        case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
        case ErrorKind::NotMinorityClass: return "NotMinorityClass";
        case ErrorKind::MissingPriors: return "MissingPriors";
        case ErrorKind::MissingDistribution: return "MissingDistribution";
        case ErrorKind::NoGoldLabels: return "NoGoldLabels";
        case ErrorKind::InconsistentM: return "InconsistentM";
        case ErrorKind::UnfittedMeta: return "UnfittedMeta";
        case ErrorKind::MissingLenientMap: return "MissingLenientMap";
        case ErrorKind::MissingGold: return "MissingGold";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::InconsistentEnsembleSize: return "InconsistentEnsembleSize";
        case ErrorKind::UnknownKey: return "UnknownKey";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // exit-code mapping for the CLI: 2 for environment/I/O, 1 for everything
    // the user can fix in their inputs
    int exit_code() const noexcept { return kind_ == ErrorKind::IoError ? 2 : 1; }

private:
    ErrorKind kind_;
};

}  // namespace camo
