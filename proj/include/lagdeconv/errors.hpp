#pragma once

#include <stdexcept>
#include <string>

namespace lagdeconv {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, invalid configuration, precondition
/// violations that a caller can fix. CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Numerical failure while processing valid-looking input. CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Triangular system whose diagonal is (numerically) zero; the kernel has a
/// vanishing leading Laguerre coefficient.
class NearSingular : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Gram matrix of the design failed the pivot test: the basis is too large
/// for the grid, or the grid is degenerate.
class RankDeficientDesign : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Delay shift removed every sample.
class EmptyAfterShift : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Log-log regression for the penalty exponent has no spread in the regressor.
class DegenerateRegression : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A matrix that must be symmetric is not, beyond roundoff tolerance.
class NotSymmetric : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Quadrature did not converge or the integrand has unresolved tail mass.
class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}
