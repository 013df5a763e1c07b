#pragma once
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csplab/errors.hpp"

namespace csplab {

// Simple undirected graph on vertices 0..n-1. Edges are stored once,
// canonically oriented (u < v) and sorted.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    Graph() = default;
    Graph(int n_, std::vector<std::pair<int, int>> edges_);

    bool has_edge(int u, int v) const;
    std::vector<std::vector<int>> adjacency() const;
    // Connected components as sorted vertex lists, ordered by smallest member.
    std::vector<std::vector<int>> components() const;
    bool is_acyclic() const;
};

Graph parse_graph(const std::string& text);
std::string write_graph(const Graph& g);

// Elimination forest: parent pointer per vertex, -1 at roots. It witnesses
// treedepth when every graph edge joins an ancestor/descendant pair.
// Depth counts vertices, so a single node has depth 1.
struct EliminationForest {
    std::vector<int> parent;

    int size() const { return int(parent.size()); }
    std::vector<int> roots() const;
    std::vector<std::vector<int>> children() const;
    // v, parent(v), ..., root
    std::vector<int> ancestors(int v) const;
    int depth() const;
    int depth_of(int v) const;  // vertices on the root path, >= 1
};

bool validate_elimination_forest(const Graph& g, const EliminationForest& f,
                                 std::string* why = nullptr);

// Exact treedepth with a witness forest. Hard cap |V| <= 20.
std::pair<int, EliminationForest> treedepth_exact(const Graph& g);

// Smallest-cardinality witnesses of size <= k, or nullopt. Ties go to the
// lexicographically smallest vertex set.
std::optional<std::vector<int>> vertex_cover_exact(const Graph& g, int k);
std::optional<std::vector<int>> feedback_vertex_set_exact(const Graph& g, int k);

// W with |W| <= k and td(G - W) <= d, together with a witness forest for
// G - W (parent array indexed by original vertex ids; vertices of W get -2).
struct Modulator {
    std::vector<int> vertices;
    EliminationForest forest;  // entries for W are -2 and must be ignored
};
std::optional<Modulator> modulator_to_treedepth(const Graph& g, int d, int k);

// Tree of vertex bags partitioning V(G); every edge of G must run inside a
// bag or between a bag and one of its ancestors. Witnesses the d-fold vertex
// cover number when depth <= d and all bags have size <= k.
struct FatEliminationTree {
    std::vector<int> parent;             // node 0 is the root, parent[0] = -1
    std::vector<std::vector<int>> bags;  // sorted; may be empty

    int size() const { return int(parent.size()); }
    int depth() const;
    int width() const;
};

bool validate_fat_elimination_tree(const Graph& g, const FatEliminationTree& t,
                                   int d, int k, std::string* why = nullptr);

std::optional<FatEliminationTree> fat_elimination_tree(const Graph& g, int d, int k);

// Smallest k admitting a depth-d fat elimination tree. d >= 1; the empty
// graph yields 0, and d = 1 yields |V(G)|.
int d_fold_vc_number(const Graph& g, int d);

// Rooted tree with an explicit child order (ascending vertex id unless
// constructed otherwise). Used for branch labelings and machine compilation.
struct RootedTree {
    std::vector<int> parent;
    std::vector<std::vector<int>> children;
    int root = -1;

    static RootedTree from_parents(const std::vector<int>& parent);
    int size() const { return int(parent.size()); }
    std::vector<int> leaves_preorder() const;
    std::vector<int> ancestors(int v) const;  // v, ..., root
    int depth() const;
};

// 0/1-string labels on tree edges such that the labels on the path from the
// root to the i-th leaf (preorder) concatenate to the fixed-width binary
// encoding of i, and sibling labels are pairwise distinct.
struct EdgeLabeling {
    std::map<std::pair<int, int>, std::string> labels;  // (parent, child)
};

EdgeLabeling tree_edge_labeling(const RootedTree& t);
bool validate_edge_labeling(const RootedTree& t, const EdgeLabeling& lab,
                            std::string* why = nullptr);

// .tree file: a parent array plus optional bags and edge labels.
struct TreeFile {
    std::vector<int> parents;
    std::optional<std::vector<std::vector<int>>> bags;
    std::optional<std::map<std::pair<int, int>, std::string>> labels;
};

TreeFile parse_tree_file(const std::string& text);
std::string write_tree_file(const TreeFile& t);

} // namespace csplab
