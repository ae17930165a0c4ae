#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mkvnoise {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unknown objective name or unsupported dimension.
class RegistryError : public Error {
 public:
  using Error::Error;
};

/// A moment driving the SMD coefficients fell below the singularity floor.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, std::ptrdiff_t coordinate, double value)
      : Error(what), coordinate_(coordinate), value_(value) {}

  std::ptrdiff_t coordinate() const noexcept { return coordinate_; }
  double value() const noexcept { return value_; }

 private:
  std::ptrdiff_t coordinate_;
  double value_;
};

/// A particle coordinate became NaN or infinite.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace mkvnoise
