#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pemscl {

enum class ErrorKind {
    Shape,
    EmptyMentions,
    NumericInput,
    InvalidLabel,
    InvalidSample,
    Contract,
    DegenerateBatch,
    DuplicatePair,
    InvalidCuts,
    Config,
    Parse,
    Io,
    InvalidState,
    NonFinite,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can map it
/// onto an exit-code category without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) {
        fail(kind, message);
    }
}

}  // namespace pemscl
