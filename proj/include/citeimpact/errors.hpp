#pragma once

#include <stdexcept>
#include <string>

namespace citeimpact {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Network-level or server-side failure that may succeed on retry.
class TransportError : public Error {
public:
    using Error::Error;
};

// The remote service does not know the requested entity.
class NotFoundError : public Error {
public:
    using Error::Error;
};

// Malformed input. Carries the offending raw text when there is one.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message, std::string raw = {})
        : Error(message), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

// Rendered prompt does not fit the configured context budget.
class PromptTooLongError : public Error {
public:
    using Error::Error;
};

} // namespace citeimpact
