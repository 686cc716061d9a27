#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbfk {

// Base class for all library failures.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A caller-visible contract was violated: bad dimension, parameter out of
// range, incompatible expansion orders. CLI exit code 2.
class constraint_error : public error {
  public:
    using error::error;
};

// A configured resource cap would be exceeded. Carries the required-bytes
// estimate. CLI exit code 3.
class resource_error : public error {
  public:
    resource_error(const std::string& what, std::size_t required_bytes)
        : error(what), required_bytes(required_bytes) {}

    std::size_t required_bytes;
};

// Numerical failure: non-finite values, singularities, ill-conditioning,
// failed decompositions. CLI exit code 4.
class numerical_error : public error {
  public:
    using error::error;
};

// Integer overflow in combinatorial arithmetic. Results never wrap.
class overflow_error : public numerical_error {
  public:
    using numerical_error::numerical_error;
};

}  // namespace rbfk
