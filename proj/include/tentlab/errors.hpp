#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tentlab {

/// Thrown by analysis operations when the underlying orbit leaves the map
/// domain before enough samples were collected.
class EscapeError : public std::runtime_error {
 public:
  EscapeError(std::size_t step, const std::string& what_arg)
      : std::runtime_error(what_arg), step_(step) {}

  /// 1-based orbit step at which the escape happened.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Thrown by statistical operations that were handed fewer bits than the
/// test needs.
class InsufficientDataError : public std::runtime_error {
 public:
  InsufficientDataError(std::size_t required, const std::string& what_arg)
      : std::runtime_error(what_arg), required_(required) {}

  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

}  // namespace tentlab
