#pragma once

#include <stdexcept>
#include <string>

namespace paclab {

// Thrown when no class member is consistent with the given labels.
// In the realizable setting this signals a bug in data generation.
struct NotRealizable : std::runtime_error {
  explicit NotRealizable(const std::string& what) : std::runtime_error(what) {}
};

// Exhaustive shattering search is capped; larger domains must declare their dimension.
struct DomainTooLarge : std::runtime_error {
  explicit DomainTooLarge(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration would exceed the configured vector budget.
struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Subsample recursion requires |U| to be a power of 4.
struct InvalidSize : std::runtime_error {
  explicit InvalidSize(const std::string& what) : std::runtime_error(what) {}
};

// Bucket construction requires the index list length to be a power of the branching factor.
struct InvalidList : std::runtime_error {
  explicit InvalidList(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyBucket : std::runtime_error {
  explicit EmptyBucket(const std::string& what) : std::runtime_error(what) {}
};

struct PreconditionViolated : std::runtime_error {
  explicit PreconditionViolated(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateInput : std::runtime_error {
  explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace paclab
