#pragma once

#include <stdexcept>
#include <string>

namespace twochoice {

// Base of every error raised by the library. Callers that only care about
// "did it work" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration or CLI usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A schedule was queried outside the range it defines.
class ScheduleTooShort : public Error {
 public:
  using Error::Error;
};

// An exponential potential would exceed the safe exponent bound.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// The threshold recursion cannot start for this n.
class DegenerateN : public Error {
 public:
  using Error::Error;
};

// Two load vectors were compared that do not have the same n and total load.
class TotalLoadMismatch : public Error {
 public:
  using Error::Error;
};

// The crossing-probability formula degenerates at r == 1.
class RIsOne : public Error {
 public:
  using Error::Error;
};

class UnknownSuite : public Error {
 public:
  using Error::Error;
};

}  // namespace twochoice
