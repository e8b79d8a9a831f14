#pragma once

#include <stdexcept>
#include <string>

namespace relaxo {

/// Raised when an input violates a documented precondition. The CLI maps
/// this to exit code 2 (usage/input error).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a derived quantity is undefined for the given inputs
/// (e.g. a relaxation time with zero total rate).
class UndefinedRate : public std::domain_error {
 public:
  explicit UndefinedRate(const std::string& what) : std::domain_error(what) {}
};

}  // namespace relaxo
