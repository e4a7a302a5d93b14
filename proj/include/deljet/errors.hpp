#ifndef DELJET_ERRORS_HPP
#define DELJET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace deljet {

// Base for all library errors. CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data (CSV schema, cadence, arity, ...).
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

struct MalformedRow : DataError {
    MalformedRow(const std::string& msg, long line)
        : DataError(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

struct NonMonotonicTimestamp : DataError {
    NonMonotonicTimestamp(long line)
        : DataError("timestamps not strictly increasing (line " + std::to_string(line) + ")"),
          line(line) {}
    long line;
};

struct CadenceGap : DataError {
    CadenceGap(long line)
        : DataError("timestamp gap is not one cadence step (line " + std::to_string(line) + ")"),
          line(line) {}
    long line;
};

struct SeriesTooShort : DataError {
    explicit SeriesTooShort(const std::string& msg) : DataError(msg) {}
};

struct EmptySplit : DataError {
    explicit EmptySplit(const std::string& msg) : DataError(msg) {}
};

struct DataNotFound : DataError {
    explicit DataNotFound(const std::string& msg) : DataError(msg) {}
};

struct SchemaMismatch : DataError {
    explicit SchemaMismatch(const std::string& msg) : DataError(msg) {}
};

// Programming/contract errors inside the numeric engine.
struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct BottleneckTooWide : ConfigError {
    explicit BottleneckTooWide(const std::string& msg) : ConfigError(msg) {}
};

struct LoadError : Error {
    explicit LoadError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace deljet

#endif
