#pragma once

#include <stdexcept>
#include <string>

namespace anisoag {

/// A numerical procedure failed to converge or produced a non-finite value.
/// Input validation problems use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace anisoag
