#pragma once

#include <stdexcept>
#include <string>

namespace autopkg {

enum class Errc {
    EmptyName,
    DuplicateName,
    CrossNodeConflict,
    UnknownNode,
    KindMismatch,
    DoubleTyping,
    UnlicensedAssertion,
    ParseError,
    ProviderFailure,
    BackendFailure,
    UnparseableAction,
    UnknownTarget,
    IllegalAction,
    TableParseError,
    JsonParseError,
    DomainError,
    MissingPrior,
    LengthMismatch,
    EmptyInput,
    NotFound,
    IoError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::EmptyName: return "EmptyName";
        case Errc::DuplicateName: return "DuplicateName";
        case Errc::CrossNodeConflict: return "CrossNodeConflict";
        case Errc::UnknownNode: return "UnknownNode";
        case Errc::KindMismatch: return "KindMismatch";
        case Errc::DoubleTyping: return "DoubleTyping";
        case Errc::UnlicensedAssertion: return "UnlicensedAssertion";
        case Errc::ParseError: return "ParseError";
        case Errc::ProviderFailure: return "ProviderFailure";
        case Errc::BackendFailure: return "BackendFailure";
        case Errc::UnparseableAction: return "UnparseableAction";
        case Errc::UnknownTarget: return "UnknownTarget";
        case Errc::IllegalAction: return "IllegalAction";
        case Errc::TableParseError: return "TableParseError";
        case Errc::JsonParseError: return "JsonParseError";
        case Errc::DomainError: return "DomainError";
        case Errc::MissingPrior: return "MissingPrior";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::NotFound: return "NotFound";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

/// Library-wide exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace autopkg
