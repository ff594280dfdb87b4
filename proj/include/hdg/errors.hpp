#pragma once

#include <stdexcept>
#include <string>

namespace hdg {

/// Base class for all solver-kit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A batched factorization hit a pivot below the singularity threshold.
/// `index` names the offending block (element or face id, depending on caller).
class SingularBlock : public Error {
public:
    SingularBlock(int index, const std::string& context)
        : Error(context + ": singular block at batch index " + std::to_string(index)),
          index(index) {}
    int index;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

class InconsistentDimensions : public Error {
public:
    explicit InconsistentDimensions(const std::string& msg)
        : Error("inconsistent dimensions: " + msg) {}
};

class InvalidResolution : public Error {
public:
    explicit InvalidResolution(const std::string& msg) : Error("invalid resolution: " + msg) {}
};

class DegenerateDomain : public Error {
public:
    explicit DegenerateDomain(const std::string& msg) : Error("degenerate domain: " + msg) {}
};

class InvertedElement : public Error {
public:
    InvertedElement(int element, double detjac)
        : Error("non-positive Jacobian determinant " + std::to_string(detjac) +
                " in element " + std::to_string(element)) {}
};

class UnsupportedOrder : public Error {
public:
    explicit UnsupportedOrder(const std::string& msg) : Error("unsupported order: " + msg) {}
};

class UnsupportedDegree : public Error {
public:
    explicit UnsupportedDegree(const std::string& msg) : Error("unsupported degree: " + msg) {}
};

/// Element mass matrix failed to factorize.
class SingularMass : public Error {
public:
    explicit SingularMass(int element)
        : Error("singular mass matrix in element " + std::to_string(element)) {}
};

/// The condensed interior operator E-bar failed to factorize.
class SingularLocalSolve : public Error {
public:
    explicit SingularLocalSolve(int element)
        : Error("singular local solve in element " + std::to_string(element)) {}
};

class NonFiniteState : public Error {
public:
    explicit NonFiniteState(const std::string& msg) : Error("non-finite state: " + msg) {}
};

class NaNDetected : public Error {
public:
    explicit NaNDetected(const std::string& msg) : Error("NaN detected: " + msg) {}
};

class TooLargeForDense : public Error {
public:
    explicit TooLargeForDense(std::size_t n)
        : Error("system of dimension " + std::to_string(n) + " exceeds the dense-expansion guard") {}
};

class LineSearchFailed : public Error {
public:
    LineSearchFailed(int newton_iter, double alpha_min)
        : Error("line search failed at Newton iteration " + std::to_string(newton_iter) +
                " (no step above alpha=" + std::to_string(alpha_min) +
                " decreases the residual)") {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("i/o error: " + msg) {}
};

/// True for the singularity/non-finite class of failures (as opposed to
/// plain non-convergence or usage problems).
inline bool is_numerical_failure(const Error& err) {
    return dynamic_cast<const SingularBlock*>(&err) != nullptr ||
           dynamic_cast<const SingularMass*>(&err) != nullptr ||
           dynamic_cast<const SingularLocalSolve*>(&err) != nullptr ||
           dynamic_cast<const NaNDetected*>(&err) != nullptr ||
           dynamic_cast<const NonFiniteState*>(&err) != nullptr ||
           dynamic_cast<const InvertedElement*>(&err) != nullptr;
}

} // namespace hdg
