#pragma once

#include <stdexcept>
#include <string>

namespace adaptloop {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid construction parameters (locus count, walk length, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Genotype length does not match the landscape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Value outside the closed interval an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateRangeError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace adaptloop
