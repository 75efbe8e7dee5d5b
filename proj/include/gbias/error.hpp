#pragma once

#include <stdexcept>
#include <string>

namespace gbias {

/// Invalid parameters or arguments outside a function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input data that cannot be used: degenerate samples, empty sections,
/// malformed files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gbias
