#ifndef QWI_ERRORS_HPP
#define QWI_ERRORS_HPP

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qwi {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. Y_nu at z = 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A value would exceed the double range (Bi grows like exp(2/3 z^{3/2})).
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Series and asymptotic routes both failed to reach the requested accuracy.
/// `residual` is the best relative accuracy estimate that was achieved.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what + " (achieved relative accuracy ~" + format(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    static std::string format(double r) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1e", r);
        return buf;
    }
    double residual_;
};

/// Adaptive integrator could not make progress.
class StepUnderflowError : public Error {
public:
    StepUnderflowError(const std::string& what, double location)
        : Error(what + " at x = " + std::to_string(location) + " nm"), location_(location) {}

    double location() const noexcept { return location_; }

private:
    double location_;
};

class BasisMismatchError : public Error {
public:
    using Error::Error;
};

class UnsupportedSizeError : public Error {
public:
    using Error::Error;
};

/// Malformed profile document. Line and column are 1-based; 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Semantically invalid profile. Carries every violation found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid profile:";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }
    std::vector<std::string> violations_;
};

}  // namespace qwi

#endif
