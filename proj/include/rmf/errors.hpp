#pragma once

#include <stdexcept>
#include <string>

namespace rmf {

// Requested size is outside what a structure supports (e.g. sieve limit).
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Query outside the range covered by a table or set.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Input violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Serialized data failed validation.
class CorruptDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rmf
