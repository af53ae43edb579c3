#pragma once

#include <vector>

#include "din/model.hpp"

namespace din {

/// Applies a slot permutation to a pattern: slot `i` moves to `perm[i]` and
/// every bond partner is renamed accordingly.
Pattern permute(const Pattern& pattern, const std::vector<int>& perm);

/// Number of permutations of same-type left-hand-side agents that are
/// automorphisms of the left-hand side and, applied to the positionally
/// matched right-hand side, of the right-hand side as well.
int rule_symmetry(const Rule& rule);

}  // namespace din
