#pragma once
#include <stdexcept>
#include <string>

namespace sqh {

// Invalid or inconsistent user-supplied configuration (unknown key, bad
// value, grid that cannot support the request, ...). CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A computation that is well-posed but refused because its cost or its
// numerical range exceeds the guarded envelope; an explicit override
// (allow_expensive) lifts the refusal. CLI exit code 3.
struct RefusalError : std::runtime_error {
  explicit RefusalError(const std::string& what) : std::runtime_error(what) {}
};

// Mathematical domain violations (negative frequency, unnormalized state,
// ...). CLI exit code 2 as well: these are caller errors.
struct DomainError : std::invalid_argument {
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Internal numerical validation tripped (NaN/Inf in a result, convergence
// check failed). CLI exit code 4.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sqh
