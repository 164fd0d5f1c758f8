#include "pemscl/error.hpp"

namespace pemscl {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Shape: return "shape";
        case ErrorKind::EmptyMentions: return "empty-mentions";
        case ErrorKind::NumericInput: return "numeric-input";
        case ErrorKind::InvalidLabel: return "invalid-label";
        case ErrorKind::InvalidSample: return "invalid-sample";
        case ErrorKind::Contract: return "contract";
        case ErrorKind::DegenerateBatch: return "degenerate-batch";
        case ErrorKind::DuplicatePair: return "duplicate-pair";
        case ErrorKind::InvalidCuts: return "invalid-cuts";
        case ErrorKind::Config: return "config";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Io: return "io";
        case ErrorKind::InvalidState: return "invalid-state";
        case ErrorKind::NonFinite: return "non-finite";
    }
    return "unknown";
}

void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, std::string(to_string(kind)) + " error: " + message);
}

}  // namespace pemscl
