#pragma once

#include <stdexcept>
#include <string>

namespace blsw {

// Base of every library failure; name() is what the CLI reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* name() const noexcept = 0;
  // 1 for bad inputs, 2 for numerical failures.
  virtual int exit_code() const noexcept { return 2; }
};

#define BLSW_ERROR(Name, Code)                                          \
  class Name : public Error {                                           \
   public:                                                              \
    using Error::Error;                                                 \
    const char* name() const noexcept override { return #Name; }        \
    int exit_code() const noexcept override { return Code; }            \
  };

BLSW_ERROR(DomainError, 1)
BLSW_ERROR(GridError, 1)
BLSW_ERROR(ConfigError, 1)
BLSW_ERROR(IoError, 1)
BLSW_ERROR(EigFailure, 2)
BLSW_ERROR(ContinuationError, 2)
BLSW_ERROR(DegenerateModeError, 2)
BLSW_ERROR(PropagationError, 2)
BLSW_ERROR(FitError, 2)

#undef BLSW_ERROR

}  // namespace blsw
