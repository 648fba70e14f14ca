#ifndef TWOTIME_ERROR_HPP
#define TWOTIME_ERROR_HPP

#include <stdexcept>
#include <string>

namespace twotime {

/// Failure categories. The CLI maps each one onto its own exit code.
enum class ErrorKind {
    ZeroRelativeMotion,
    SingularMatch,
    InvalidMode,
    InvalidParams,
    StepTooCoarse,
    TooFewFringes,
    DivisionByZeroWidth,
    ParseError,
    ValidationError,
    IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Process exit status for an error category (never 0).
int exit_code(ErrorKind kind);

} // namespace twotime

#endif
