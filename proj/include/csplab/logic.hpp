#pragma once
#include <map>
#include <set>
#include <string>
#include <vector>

#include "csplab/core.hpp"
#include "csplab/structure.hpp"

namespace csplab {

// Finite relational structure over a binary signature: elements are the ids
// 0..universe-1, relations have arity 1 or 2 and explicit tuple sets.
struct RelationalStructure {
    int universe = 0;
    std::map<std::string, int> arity;
    std::map<std::string, std::set<std::vector<int>>> tuples;

    void add_relation(const std::string& name, int ar);
    void add_tuple(const std::string& name, std::vector<int> tup);
    bool has_relation(const std::string& name) const;
    // Tuple membership. Throws InputError when the relation is not declared.
    bool holds(const std::string& name, const std::vector<int>& tup) const;
    void validate() const;
};

// Quantifier-free formula tree. Leaves are relation atoms, equalities between
// variables, and Boolean constants; inner nodes are and/or/not. Relation and
// equality arguments are variable ids resolved by the enclosing sentence.
struct FoTerm {
    enum class Kind { relation, equals, conj, disj, neg, constant };

    Kind kind = Kind::constant;
    bool value = false;      // constant
    std::string rel;         // relation
    std::vector<int> args;   // relation, equals
    std::vector<FoTerm> kids;  // conj/disj (any arity), neg (exactly one)

    static FoTerm truth(bool v);
    static FoTerm atom(std::string rel, std::vector<int> args);
    static FoTerm equal(int a, int b);
    static FoTerm conj_of(std::vector<FoTerm> kids);
    static FoTerm disj_of(std::vector<FoTerm> kids);
    static FoTerm neg_of(FoTerm kid);
};

// Guided sentence of depth k: forall x_1 exists y_1 ... forall x_k exists y_k
// with the universal chain guard root(x_1), parent(x_1,x_2), ...,
// parent(x_{k-1},x_k) implying the matrix. Variable ids are fixed by level:
// x_i is 2*(i-1) and y_i is 2*(i-1)+1 (i from 1).
struct GuidedSentence {
    int k = 0;
    FoTerm matrix;

    void validate() const;
};

struct QuantifierBlock {
    bool existential = true;
    std::vector<int> vars;
};

// Prenex sentence: quantifier blocks over distinct variables followed by a
// quantifier-free matrix. Adjacent blocks must alternate in kind.
struct PrenexSentence {
    std::vector<QuantifierBlock> blocks;
    FoTerm matrix;

    void validate() const;
};

// Sigma_t shape: at most t blocks and, when any are present, the first one
// existential (alternation is already part of validate()).
bool is_sigma_shape(const PrenexSentence& s, int t);

struct GuidedStats {
    long chains_examined = 0;  // distinct complete guard chains reached
    long matrix_evals = 0;
};

// Model checking. Guided evaluation walks the universal variables only along
// root-to-descendant chains of the parent relation; a chain that stops early
// leaves the guard unsatisfied, so the branch is vacuously true. Prenex
// evaluation nests directly over the universe. Both cut a branch short as
// soon as the partially assigned matrix has a determined value. Relations
// used by the sentence (plus root/parent for the guided guard) must be
// declared in the structure, else InputError.
bool eval_guided(const RelationalStructure& a, const GuidedSentence& s,
                 GuidedStats* stats = nullptr);
bool eval_prenex(const RelationalStructure& a, const PrenexSentence& s);

// Instance plus elimination forest as a forest-shaped structure with a guided
// sentence that holds iff the instance is satisfiable. The forest is padded
// to uniform depth k = max(1, depth(f)) with fresh vertices carrying fresh
// singleton domains, so every branch supports a complete guard chain.
// Universe: padded vertices, then one element per (vertex, value). Relations:
// forest (vertices), parent (forest edges), root (forest roots and every
// value element), domain, forbidden (disallowed value pairs, both orders).
struct GuidedEncoding {
    RelationalStructure structure;
    GuidedSentence sentence;
    int padded_vertices = 0;
    std::vector<int> vertex_element;                // per padded-forest vertex
    std::vector<std::map<int, int>> value_element;  // per vertex: value -> element
};
GuidedEncoding bincsp_td_to_structure(const BinCspInstance& inst, const EliminationForest& f);

// Instance plus fat elimination tree as a structure with a prenex sentence
// that holds iff the instance is satisfiable. The witness is padded so every
// bag has size exactly k = width(w) and every leaf sits at depth d =
// depth(w); padding vertices get fresh singleton domains and no constraints.
// Universe: tree nodes, then vertices, then (vertex, value) elements.
// Relations: root (tree root), parent (tree edges), bag, domain, forbidden.
// The sentence has at most 2d-1 alternating blocks starting existential: per
// level one universal tree variable (the root is existential) and k
// existential (vertex, value) pairs.
struct PrenexEncoding {
    RelationalStructure structure;
    PrenexSentence sentence;
    int tree_nodes = 0;  // after padding
    int vertices = 0;    // after padding
    std::vector<int> node_element;
    std::vector<int> vertex_element;
    std::vector<std::map<int, int>> value_element;
};
PrenexEncoding bincsp_dfold_to_prenex(const BinCspInstance& inst, const FatEliminationTree& w);

// Text formats. Structures: "universe <n>", then "rel <name> <arity>" and
// "tup <name> <e1> [<e2>]" lines. Sentences: one s-expression, either prenex
// quantifiers "(exists (v0 v1) (forall (v2) <matrix>))" or the guided form
// "(guided <k> <matrix>)" with variables x1..xk, y1..yk. Matrix atoms are
// "(<rel> <var>...)", "(= <var> <var>)", connectives and/or/not, constants
// true/false. Prenex variables get fresh ids in declaration order.
RelationalStructure parse_struct(const std::string& text);
std::string write_struct(const RelationalStructure& a);
PrenexSentence parse_fo(const std::string& text);
GuidedSentence parse_guided_fo(const std::string& text);
std::string write_fo(const PrenexSentence& s);
std::string write_fo(const GuidedSentence& s);

}  // namespace csplab
