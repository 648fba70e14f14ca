#include "twotime/error.hpp"

namespace twotime {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::ZeroRelativeMotion: return "ZeroRelativeMotion";
    case ErrorKind::SingularMatch: return "SingularMatch";
    case ErrorKind::InvalidMode: return "InvalidMode";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::StepTooCoarse: return "StepTooCoarse";
    case ErrorKind::TooFewFringes: return "TooFewFringes";
    case ErrorKind::DivisionByZeroWidth: return "DivisionByZeroWidth";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::ValidationError:
    case ErrorKind::InvalidParams: return 2;
    case ErrorKind::ParseError: return 3;
    case ErrorKind::ZeroRelativeMotion:
    case ErrorKind::SingularMatch:
    case ErrorKind::InvalidMode: return 4;
    case ErrorKind::StepTooCoarse:
    case ErrorKind::TooFewFringes:
    case ErrorKind::DivisionByZeroWidth: return 5;
    case ErrorKind::IoError: return 6;
    }
    return 1;
}

} // namespace twotime
