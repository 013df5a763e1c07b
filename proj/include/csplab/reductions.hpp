#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "csplab/core.hpp"
#include "csplab/formulas.hpp"

namespace csplab {

// Metadata attached to every reduction output: the rule that produced it, the
// parameter the output declares, and free-form notes. Witness structures ride
// on the output structs themselves so the structure-module validators can be
// pointed at them directly.
struct ReductionReport {
    std::string rule;
    std::string parameter;
    int parameter_value = 0;
    std::vector<std::string> notes;
};

// BinCSP instance together with a modulator witness. `forest` is a parent
// array over all instance vertices, -2 on modulator vertices and -1 at roots;
// for cover-style outputs the remainder is edgeless, so every non-modulator
// entry is -1.
struct BinCspWithModulator {
    BinCspInstance instance;
    std::vector<int> modulator;
    std::vector<int> forest;
    ReductionReport report;
};

struct CircuitWithBudget {
    BooleanCircuit circuit;
    int k = 0;
    ReductionReport report;
};

struct PrecoloringWithModulator {
    PrecoloringInstance instance;
    std::vector<int> modulator;
    std::vector<int> forest;
    ReductionReport report;
};

// Weighted satisfiability of an antimonotone formula of level <= 3 as a
// BinCSP whose vertex cover has size k: a k-clique of variable-choice
// vertices is joined to one vertex per top-level disjunction whose value
// points at a satisfied term. A weight above the variable count yields a
// canonical unsatisfiable instance (one variable, empty domain).
BinCspWithModulator wsat3am_to_bincsp_vc(const NormalizedFormula& f, int k);

// BinCSP with a vertex cover as weighted satisfiability at weight |cover|:
// one variable per (cover vertex, value); clauses demand a value for every
// cover vertex, compatibility across cover-internal edges, and a compatible
// value for every outside vertex. Output level <= 3.
WeightedSatInstance bincsp_vc_to_wsat3(const BinCspInstance& inst,
                                       const std::vector<int>& cover);

// Weighted satisfiability of an antimonotone formula of level <= 2d+1 as a
// BinCSP whose graph minus a k-clique is a forest of depth <= d. Forest
// vertices stand for the disjunctions of the formula tree; their values point
// at a term, with an extra inactive value 0 off the chosen branch.
BinCspWithModulator wsat2d1am_to_bincsp_forest_modulator(const NormalizedFormula& f,
                                                         int k, int d);

// BinCSP with modulator W and an elimination forest of depth d over the rest
// as weighted satisfiability at weight |W|, level <= 2d+1. Enumerates per
// vertex the conflict-free assignments of its ancestor chain; family_cap
// bounds each such family (resource error beyond it).
WeightedSatInstance bincsp_modtd_to_wsat2d1(const BinCspInstance& inst,
                                            const std::vector<int>& modulator,
                                            const std::vector<int>& forest,
                                            std::size_t family_cap = 100000);

// Unbounded-depth variant of wsat2d1am_to_bincsp_forest_modulator accepting
// any odd level; the clique becomes a feedback vertex set of size k.
BinCspWithModulator wsatam_to_bincsp_fvs(const NormalizedFormula& f, int k);

// BinCSP with a feedback vertex set W as weight-|W| circuit satisfiability.
// Inputs choose values for W; one shared gate per (tree vertex, value) states
// that the subtree below it can be completed, so each gate is built once and
// reused by every in-edge.
CircuitWithBudget bincsp_fvs_to_circuit(const BinCspInstance& inst,
                                        const std::vector<int>& fvs);

// List coloring with a vertex cover as weighted satisfiability over clauses
// only (level <= 2). Outside vertices are grouped by their neighborhood in
// the cover; each group gets private copies of its neighborhood plus
// auxiliary sorted-color, copy-tracker and interval vertices, so that "some
// list color avoids the whole neighborhood" becomes a single clause. Weight
// |cover| + 4 * (sum of group neighborhood sizes).
WeightedSatInstance listcoloring_vc_to_wsat2(const ListColoringInstance& lc,
                                             const std::vector<int>& cover);

// List coloring with modulator W and a forest of depth d over the rest as
// precoloring extension with the same modulator and depth <= d+1: every
// missing list color is blocked by a fresh precolored pendant, hanging below
// its vertex (or as a singleton root when the vertex is in W).
PrecoloringWithModulator listcoloring_to_precolext(const ListColoringInstance& lc,
                                                   const std::vector<int>& modulator,
                                                   const std::vector<int>& forest);

// Kernelization result: either an immediate verdict or a reduced instance.
// `kernel_vertices` maps kernel vertex ids back to input ids.
struct KernelResult {
    bool decided = false;
    bool satisfiable = false;
    ListColoringInstance kernel;
    std::vector<int> kernel_vertices;
    ReductionReport report;
};

// Precoloring extension with a vertex cover: at most |cover| colors is solved
// outright by the elimination-forest DP; otherwise only the uncolored cover
// vertices that keep fewer than |cover| usable colors remain, as an
// equivalent list-coloring kernel on at most |cover| vertices.
KernelResult precolext_vc_kernel(const PrecoloringInstance& pre,
                                 const std::vector<int>& cover);

// Strip result: either an immediate verdict or an equivalent list-coloring
// instance on the kept vertices with refreshed modulator/forest witnesses.
struct StripResult {
    bool decided = false;
    bool satisfiable = false;
    ListColoringInstance instance;
    std::vector<int> kept;
    std::vector<int> modulator;
    std::vector<int> forest;
    ReductionReport report;
};

// Precoloring extension with modulator S and a depth-d forest over the rest:
// at most depth+|S| colors is solved outright; otherwise uncolored vertices
// with fewer neighbors than colors are peeled (they can always be colored
// last) and precolored vertices dissolve into list filters, leaving an
// equivalent list-coloring instance whose forest loses at least one level.
StripResult precolext_modtd_strip(const PrecoloringInstance& pre,
                                  const std::vector<int>& modulator,
                                  const std::vector<int>& forest);

} // namespace csplab
