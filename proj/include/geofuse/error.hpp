#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace geofuse {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error
{
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message)
        , m_kind(std::move(kind))
    {}

    const std::string& kind() const noexcept { return m_kind; }

private:
    std::string m_kind;
};

/// Malformed input file. `location` is a 1-based line number for text
/// formats and a byte offset for binary payloads.
class ParseError : public Error
{
public:
    enum class Unit { line, byte };

    ParseError(const std::string& path, Unit unit, std::uint64_t location, const std::string& what)
        : Error("parse_error",
                path + (unit == Unit::line ? ":line " : ":byte ") + std::to_string(location) + ": " + what)
        , m_unit(unit)
        , m_location(location)
    {}

    Unit unit() const noexcept { return m_unit; }
    std::uint64_t location() const noexcept { return m_location; }

private:
    Unit m_unit;
    std::uint64_t m_location;
};

class ValidationError : public Error
{
public:
    explicit ValidationError(const std::string& what) : Error("validation_error", what) {}
};

class InvalidArgument : public Error
{
public:
    explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

class ConvergenceError : public Error
{
public:
    explicit ConvergenceError(const std::string& what) : Error("convergence_error", what) {}
};

class IoError : public Error
{
public:
    explicit IoError(const std::string& what) : Error("io_error", what) {}
};

} // namespace geofuse
