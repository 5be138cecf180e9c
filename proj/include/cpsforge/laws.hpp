#pragma once

#include <cstdint>
#include <string>

#include "cpsforge/monads.hpp"

namespace cpsforge {

struct LawReport {
  int cases = 0;
  int left_identity_failures = 0;
  int right_identity_failures = 0;
  int associativity_failures = 0;
  std::string first_failure;
  bool ok() const { return left_identity_failures + right_identity_failures + associativity_failures == 0; }
};

/// Randomized check of the three monad laws for one kernel instance. Both
/// sides run in fresh kernels and are compared by result and counters.
LawReport check_monad_laws(MonadId m, int cases, std::uint64_t seed);

}  // namespace cpsforge
