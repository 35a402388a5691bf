#pragma once

#include <stdexcept>
#include <string>

namespace hsmix {

class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class resource_limit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class precision_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a convergence condition fails; callers may still request
// the value through an explicit override.
class not_in_domain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class inadmissible_configuration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExitCode : int {
  ok = 0,
  usage = 1,
  precision = 2,
  resource = 3,
};

}  // namespace hsmix
