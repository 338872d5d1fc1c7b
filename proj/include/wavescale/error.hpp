#pragma once

#include <stdexcept>
#include <string>

namespace wavescale {

// Base error for invalid inputs and failed numerical preconditions.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

}  // namespace wavescale
