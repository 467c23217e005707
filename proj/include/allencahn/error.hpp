#pragma once

#include <stdexcept>
#include <string>

namespace allencahn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad input: violated precondition, malformed config, mismatched mesh.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A numerical procedure (quadrature, Newton, eigensolver) failed to converge.
class SolverError : public Error {
public:
  using Error::Error;
};

}  // namespace allencahn
