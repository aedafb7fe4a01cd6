#pragma once

#include <stdexcept>
#include <string>

namespace oarpost {

/// Raised when an input violates an operation's contract (empty mask,
/// geometry mismatch, malformed file, ...). The message names the contract.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace oarpost
