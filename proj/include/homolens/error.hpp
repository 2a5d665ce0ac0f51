#pragma once

#include <stdexcept>
#include <string>

namespace homolens {

/// Caller violated an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A model hypothesis guarding an estimator's parameters does not hold.
/// The message names the violated inequality.
class HypothesisError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input text could not be parsed; message carries the line number when known.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical construction failed its self-check (kernel residual, quadrature).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation would exceed a configured size cap (simplices, lattice cells).
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace homolens
