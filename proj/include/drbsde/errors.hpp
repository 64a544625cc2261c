#pragma once

#include <stdexcept>
#include <string>

namespace drbsde {

/// Invalid model or problem data: bad volatility grids, incompatible
/// obstacles, malformed configuration.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// An exhaustive enumeration would exceed the configured cap.
class CapError : public std::runtime_error {
 public:
  explicit CapError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical identity that must hold by construction failed to hold.
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace drbsde
