#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csplab/errors.hpp"

namespace csplab {

// Formula tree over AND/OR gates and signed literals. Gates alternate
// strictly (an AND never feeds an AND, an OR never an OR) below an AND root.
// Literals may sit at any depth; a literal above the deepest level reads as
// wrapped in singleton gates, so the level of the whole tree is
// max(2, deepest gate depth, deepest literal depth - 1).
struct NormalizedFormula {
    enum class Kind { And, Or, Lit };
    struct Node {
        Kind kind = Kind::And;
        int var = -1;  // literals only
        bool positive = true;
        std::vector<int> children;  // gates only, indices of earlier nodes
    };
    std::vector<Node> nodes;
    int root = -1;
    int num_vars = 0;

    int add_and(std::vector<int> children);
    int add_or(std::vector<int> children);
    int add_lit(int var, bool positive);
};

// Level of the tree as defined above. Throws InputError when the root is not
// an AND, two like gates are adjacent, or an index is out of range.
int normalization_level(const NormalizedFormula& f);

// Standard semantics; empty AND is true, empty OR is false. `truth` must
// assign every variable.
bool eval_formula(const NormalizedFormula& f, const std::vector<bool>& truth);

bool is_antimonotone(const NormalizedFormula& f);  // every literal negated
bool is_monotone(const NormalizedFormula& f);      // every literal plain

// Equivalent formula whose literals all sit at depth t+1, obtained by
// wrapping each literal in singleton gates. Requires t >= current level.
// A formula without literals comes back unchanged.
NormalizedFormula pad_to_level(const NormalizedFormula& f, int t);

// Random formula with gates at depths 1..t, uniform literal depth t+1, and
// gate widths in 1..max_width. sign < 0 makes every literal negated, sign > 0
// plain, sign = 0 mixed.
NormalizedFormula random_normalized_formula(int t, int num_vars, int max_width, uint64_t seed,
                                            int sign = 0);

struct WeightedSatInstance {
    NormalizedFormula formula;
    int k = 0;
    std::vector<std::string> names;  // optional, indexed by variable
};

// First size-k variable set in colexicographic order that satisfies the
// formula, or absent. Throws ResourceError when binom(n,k) exceeds cap.
std::optional<std::vector<int>> weighted_sat_bruteforce(const WeightedSatInstance& w,
                                                        long cap = 10'000'000);

// Gate list forming a DAG; `inputs` are indices of other gates.
struct BooleanCircuit {
    enum class Kind { Input, And, Or, Not };
    struct Gate {
        Kind kind = Kind::And;
        int var = -1;  // INPUT only
        std::vector<int> inputs;
    };
    std::vector<Gate> gates;
    int output = -1;
    int num_vars = 0;

    int add_input(int var);
    int add_and(std::vector<int> inputs);
    int add_or(std::vector<int> inputs);
    int add_not(int input);
    void validate() const;  // arities, ranges, acyclicity
};

bool eval_circuit(const BooleanCircuit& c, const std::vector<bool>& truth);

std::optional<std::vector<int>> weighted_circuit_sat_bruteforce(const BooleanCircuit& c, int k,
                                                                long cap = 10'000'000);

// Same function as the formula: one INPUT gate per variable (so the variable
// count survives serialization), shared NOT gates for negated literals.
BooleanCircuit formula_to_circuit(const NormalizedFormula& f);

WeightedSatInstance parse_wsat(const std::string& text);
std::string write_wsat(const WeightedSatInstance& w);
BooleanCircuit parse_circuit(const std::string& text);
std::string write_circuit(const BooleanCircuit& c);

} // namespace csplab
