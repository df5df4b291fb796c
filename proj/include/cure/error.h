#ifndef CURE_ERROR_H_
#define CURE_ERROR_H_

#include <stdexcept>
#include <string>

namespace cure {

// Bad input: malformed files, invalid trees, out-of-range settings.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf in a computation, or any other failure while running a stage.
// The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cure

#endif  // CURE_ERROR_H_
