#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trajpriv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or cell fell outside the grid.
class OutOfGridError : public Error {
 public:
  using Error::Error;
};

/// A region of the requested size cannot be built inside the grid.
class RegionSizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, including a size slack too small for the observed regions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An observed region's area falls outside the attacker's [ell, ell + gamma] band.
class GammaTooSmallError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// The observation sequence has zero probability under the model.
class DecodingError : public Error {
 public:
  DecodingError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Truth and prediction sets cannot be paired.
class MismatchError : public Error {
 public:
  using Error::Error;
};

class PrivacyViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace trajpriv
