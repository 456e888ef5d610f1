#pragma once

#include <stdexcept>
#include <string>

namespace credence {

// Base class for all typed pipeline errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A stated precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// --- backend ---

class AuthError : public Error {
public:
    using Error::Error;
};

class ExhaustedRetries : public Error {
public:
    ExhaustedRetries(const std::string& msg, std::string last_cause)
        : Error(msg + " (last cause: " + last_cause + ")"), last_cause_(std::move(last_cause)) {}
    const std::string& last_cause() const { return last_cause_; }

private:
    std::string last_cause_;
};

class MalformedResponse : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    using Error::Error;
};

class UnknownStage : public Error {
public:
    using Error::Error;
};

// --- corpus ---

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

class DuplicateId : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class SchemaMismatch : public Error {
public:
    using Error::Error;
};

// --- generation & extraction ---

class EmptyGeneration : public Error {
public:
    using Error::Error;
};

class PlannerParseError : public Error {
public:
    using Error::Error;
};

class ScoreParseError : public Error {
public:
    using Error::Error;
};

class NoJsonFound : public Error {
public:
    using Error::Error;
};

class ScoreOutOfRange : public Error {
public:
    using Error::Error;
};

class MissingField : public Error {
public:
    using Error::Error;
};

class LabelParseError : public Error {
public:
    using Error::Error;
};

// --- metrics ---

class EmptyInput : public Error {
public:
    using Error::Error;
};

class NonPositiveBaseline : public Error {
public:
    using Error::Error;
};

class TooFewItems : public Error {
public:
    using Error::Error;
};

class DegenerateVariance : public Error {
public:
    using Error::Error;
};

class DegenerateChance : public Error {
public:
    using Error::Error;
};

} // namespace credence
