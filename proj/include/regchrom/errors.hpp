#pragma once

#include <stdexcept>
#include <string>

namespace regchrom {

/// Base for every error raised by the library. `code()` is a stable,
/// machine-readable identifier; `what()` is the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A size guard refused the request (exact enumeration would be too large).
class GuardError : public Error {
public:
    explicit GuardError(const std::string& message) : Error("guard_refused", message) {}
};

/// Parameters violate a feasibility condition (e.g. dn odd, k does not divide n).
class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& message) : Error("infeasible", message) {}
};

/// A formula was evaluated outside its domain of validity.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error("domain", message) {}
};

/// Malformed input data (file formats, matrices, flow tables, CLI values).
class InputError : public Error {
public:
    explicit InputError(const std::string& message) : Error("invalid_input", message) {}
};

}  // namespace regchrom
