#pragma once
#include <optional>
#include <vector>

#include "csplab/core.hpp"
#include "csplab/structure.hpp"

namespace csplab {

// All solvers return the lexicographically least satisfying assignment under
// variable-id/value order, or absent. They agree with each other wherever
// their structural preconditions hold.

// Ground truth: tries every assignment. Throws ResourceError when the product
// of the domain sizes exceeds cap.
std::optional<std::vector<int>> solve_bruteforce(const BinCspInstance& inst,
                                                 long cap = 10'000'000);

// Top-down DP over an elimination forest of the constraint graph, memoized on
// (node, values of the ancestors constrained into the node's subtree).
std::optional<std::vector<int>> solve_by_elimination_forest(const BinCspInstance& inst,
                                                            const EliminationForest& f);

// Enumerates assignments of a vertex cover; everything outside the cover is
// independent and checked per vertex.
std::optional<std::vector<int>> solve_by_vertex_cover(const BinCspInstance& inst,
                                                      const std::vector<int>& cover);

// Enumerates assignments of the modulator W, folds its constraints into unary
// domain filters, then runs the forest DP on the rest. `forest` covers
// exactly the vertices outside W (entries of W are -2).
std::optional<std::vector<int>> solve_by_modulator(const BinCspInstance& inst,
                                                   const std::vector<int>& w,
                                                   const EliminationForest& forest);

} // namespace csplab
