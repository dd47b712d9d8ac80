#pragma once

#include <stdexcept>
#include <string>

namespace stclust {

/// Bad input: malformed data, violated preconditions. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative method failed to converge or bracket. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stclust
