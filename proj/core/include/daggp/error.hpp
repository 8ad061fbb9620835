#pragma once

#include <stdexcept>
#include <string>

namespace daggp {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Malformed graphs: cycles, dangling edges, bad confounder pairs.
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& what) : Error("structural", what) {}
};

/// Interventions on variables that cannot be manipulated or values outside D(X).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// Rank-deficient regressions.
class DegeneracyError : public Error {
public:
    explicit DegeneracyError(const std::string& what) : Error("degeneracy", what) {}
};

/// Intervention set outside the subset that admits a shared base function.
class TransferError : public Error {
public:
    explicit TransferError(const std::string& what) : Error("transfer", what) {}
};

/// Cholesky failure after the jitter ladder, negative predictive variance.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error("numerical", what) {}
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

} // namespace daggp
