#pragma once

#include <stdexcept>
#include <string>

namespace vitdesc {

// Root of everything the library throws on bad input or failed numerics.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller supplied something that violates a precondition (bad shapes,
// out-of-range arguments, unreadable files). The CLI maps this to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

// A numerical routine could not produce a usable result. CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public InputError {
public:
    using InputError::InputError;
};

// VITD container problems. Each corruption class has its own type so callers
// (and the robustness suite) can tell them apart.
class FormatError : public InputError {
public:
    using InputError::InputError;
};

class BadMagicError : public FormatError {
public:
    using FormatError::FormatError;
};

class UnsupportedVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

class HeaderError : public FormatError {
public:
    using FormatError::FormatError;
};

// Declared lengths disagree with the bytes on disk (includes truncation).
class ShapeMismatchError : public FormatError {
public:
    using FormatError::FormatError;
};

class NonFiniteError : public FormatError {
public:
    using FormatError::FormatError;
};

// A field fails its own invariants (used on write and on construction).
class InvariantError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace vitdesc
