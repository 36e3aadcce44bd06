#pragma once

#include <stdexcept>
#include <string>

namespace opshift {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NotSquareError : public Error {
 public:
  using Error::Error;
};

class MissingWeightError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class BoxError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class ProblemError : public Error {
 public:
  using Error::Error;
};

}  // namespace opshift
