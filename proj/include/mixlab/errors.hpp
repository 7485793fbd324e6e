#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Vector/matrix sizes do not agree with the operation's contract.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// A symmetric factorization failed: the matrix is not positive definite
/// at the working tolerance.
class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// A responsibility row lost all mass after log-sum-exp stabilization.
class DegenerateResponsibility : public Error {
public:
    explicit DegenerateResponsibility(const std::string& msg) : Error(msg) {}
};

/// An M-step column sum fell below the empty-component threshold.
class EmptyComponent : public Error {
public:
    explicit EmptyComponent(const std::string& msg) : Error(msg) {}
};

/// Input data has no usable extent (e.g. zero-width bounding box).
class DegenerateData : public Error {
public:
    explicit DegenerateData(const std::string& msg) : Error(msg) {}
};

/// The model lacks the structure a closed-form operation requires.
class UnsupportedModel : public Error {
public:
    explicit UnsupportedModel(const std::string& msg) : Error(msg) {}
};

/// The change-of-variables map has a singular Jacobian at the queried point.
class SingularMap : public Error {
public:
    explicit SingularMap(const std::string& msg) : Error(msg) {}
};

/// A Monte Carlo integrand evaluated to a non-finite value.
class NonFiniteIntegrand : public Error {
public:
    explicit NonFiniteIntegrand(const std::string& msg) : Error(msg) {}
};

/// A network forward or backward pass produced a non-finite value.
class NumericalOverflow : public Error {
public:
    explicit NumericalOverflow(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace mixlab
