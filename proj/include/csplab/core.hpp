#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "csplab/structure.hpp"

namespace csplab {

// Binary CSP: finite domain per variable, allowed value pairs per edge of the
// constraint graph. A constraint is stored once, keyed by (min id, max id);
// the reversed view C(v,u) = {(b,a) : (a,b) in C(u,v)} is derived on access.
struct BinCspInstance {
    int n = 0;
    std::vector<std::vector<int>> domains;  // sorted unique value tokens
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> constraints;

    // Registers C(u,v) = allowed (values listed as seen from u, v). Throws if
    // the edge is already constrained.
    void add_constraint(int u, int v, std::vector<std::pair<int, int>> allowed_pairs);
    // Like add_constraint, but intersects with an existing constraint.
    void intersect_constraint(int u, int v, std::vector<std::pair<int, int>> allowed_pairs);

    bool has_edge(int u, int v) const;
    std::vector<std::pair<int, int>> allowed(int u, int v) const;  // oriented u -> v
    bool pair_allowed(int u, int v, int a, int b) const;
    bool in_domain(int u, int value) const;
    std::vector<std::pair<int, int>> edge_list() const;
    Graph gaifman() const;
    void validate() const;
};

// Total assignment indexed by variable. Throws InputError when the vector is
// not total or leaves a declared domain; returns whether all constraints hold.
bool check_assignment(const BinCspInstance& inst, const std::vector<int>& assignment);

struct ListColoringInstance {
    Graph graph;
    std::vector<int> colors;              // global color set, sorted unique
    std::vector<std::vector<int>> lists;  // per-vertex sorted subsets

    void validate() const;
};

struct PrecoloringInstance {
    Graph graph;
    std::vector<int> colors;
    std::map<int, int> precolor;  // vertex -> color

    void validate() const;
};

// List coloring as a BinCSP: same graph, domains are the lists, edges allow
// unequal colors.
BinCspInstance listcoloring_to_bincsp(const ListColoringInstance& lc);

// BinCSP as list coloring. Variable i keeps its id; every value becomes a
// color tagged by its variable, and each forbidden pair (a,b) on an edge uv
// turns into one fresh vertex adjacent to u and v whose list is exactly the
// two tagged colors, so it is colorable unless u,v pick that pair.
struct TaggedListColoring {
    ListColoringInstance lc;
    std::vector<std::vector<int>> tag;  // tag[u][i] = color of domains[u][i]
    int gadget_vertices = 0;
};
TaggedListColoring bincsp_to_listcoloring(const BinCspInstance& inst);

// Seeded generator used by all verification campaigns. Domain sizes are
// uniform in 1..max_dom, each edge appears with edge_prob, and each value
// pair of a present edge is allowed with pair_prob.
BinCspInstance random_instance(int n, int max_dom, double edge_prob, double pair_prob,
                               uint64_t seed);

BinCspInstance parse_bincsp(const std::string& text);
std::string write_bincsp(const BinCspInstance& inst);
ListColoringInstance parse_listcoloring(const std::string& text);
std::string write_listcoloring(const ListColoringInstance& lc);
PrecoloringInstance parse_precoloring(const std::string& text);
std::string write_precoloring(const PrecoloringInstance& pre);

} // namespace csplab
