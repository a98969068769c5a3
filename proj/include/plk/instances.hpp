#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plk/lift.hpp"

namespace plk {

struct LiftInstance {
  std::string label;
  SimplicialMap f;
  LiftFunction g;
};

/// f(x) = |x| on a symmetric random path in [−1,1]; g = x·(1 + small waves), k ∈ {1,2}.
LiftInstance random_fold_1d(std::uint64_t seed, int k);
/// Two copies of a randomly triangulated unit square (the second shifted by 3 in x)
/// mapped onto one copy; g separates the sheets by a constant gap, k ∈ {1,2}.
LiftInstance random_sheets_2d(std::uint64_t seed, int k);
/// f(x,y) = (|x|, y) on a symmetric random grid over [−1,1]×[0,1]; k ∈ {1,2}.
LiftInstance random_fold_2d(std::uint64_t seed, int k);

/// Builtin instance by name: "absval", "fold1d", "sheets2d", "fold2d".
/// Throws UnknownBuiltin for other names.
LiftInstance builtin_instance(const std::string& name, std::uint64_t seed = 0, int k = 1);

}  // namespace plk
