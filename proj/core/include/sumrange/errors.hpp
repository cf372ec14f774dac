#pragma once

#include <stdexcept>
#include <string>

namespace sumrange {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live on different cube lists, or a cube is not part of a domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid builder or run parameters (depth, index-set sizes, point counts).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The family lacks the structure an operation needs.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Input values violate an operation's contract (not a permutation, not integer-valued, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed text input.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace sumrange
