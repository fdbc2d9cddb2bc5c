#pragma once

#include <stdexcept>
#include <string>

namespace sfpl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands whose sizes do not agree (grid lengths, matrix shapes, covariate counts).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A scalar parameter outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a mathematical function (e.g. a negative kernel argument).
class DomainError : public Error {
public:
    using Error::Error;
};

class DegenerateDirectionError : public Error {
public:
    using Error::Error;
};

/// Least-squares problem without a unique solution.
class IllPosedError : public Error {
public:
    using Error::Error;
};

/// Singular normal equations in the profile least-squares step.
class RankError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; the message carries the row/column location.
class LoadError : public Error {
public:
    using Error::Error;
};

/// Serialized fit with an unknown or incompatible schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace sfpl
