#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twopulse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf met while integrating the Bloch equations; carries the T index.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, std::size_t t_index)
      : Error(what), t_index_(t_index) {}
  std::size_t t_index() const noexcept { return t_index_; }

 private:
  std::size_t t_index_;
};

/// A Z step was rejected because the grid cannot resolve the field update.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, double z) : Error(what), z_(z) {}
  double z() const noexcept { return z_; }

 private:
  double z_;
};

/// Only diagonal, field-free proto-solutions can be dressed.
class UnsupportedProto : public Error {
 public:
  using Error::Error;
};

/// alpha2 == beta2: no Raman inversion, so no finite transfer length.
class DegenerateInversion : public Error {
 public:
  using Error::Error;
};

class NotSinglePulse : public Error {
 public:
  using Error::Error;
};

}  // namespace twopulse
