#pragma once

// Self-check suite: the library's invariants evaluated on seeded random
// instances and on the model problems.

#include <cstdint>
#include <string>
#include <vector>

namespace relbounds {

struct VerifyOptions {
  std::uint64_t seed = 20160817;
  /// Mutation check: build the moment matrix as Ω = Ψ + D_μ (sign flipped)
  /// in the route-equivalence property. That property must then fail;
  /// used to confirm the suite can detect a broken η formula.
  bool mutate_moments = false;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;  // worst observed value against its tolerance
};

std::vector<PropertyResult> run_verify(const VerifyOptions& options = {});

}  // namespace relbounds
