#pragma once

#include <stdexcept>
#include <string>

namespace qfluid {

enum class ErrorKind {
  InvalidArgument,  // parameters or configuration violate an invariant
  Domain,           // no oscillatory regime / formula outside its range
  Numerical,        // blow-up, root not found
  Bracket,          // threshold scan endpoints do not straddle a transition
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qfluid
