#pragma once
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csplab/errors.hpp"

namespace csplab {

// Rooted tree whose child order is significant. Depth counts vertices per
// root-to-leaf branch, so a single node has depth 1.
struct OrderedTree {
    std::vector<int> parent;                 // -1 at the root
    std::vector<std::vector<int>> children;  // in order
    int root = 0;
    // (n', k') per node when built by build_universal_tree; empty otherwise
    std::vector<std::pair<int, int>> note;

    int size() const { return int(parent.size()); }
    // Appends a node as the last child of p; p = -1 roots an empty tree.
    int add_child(int p);
    int depth() const;
    int leaf_count() const;
    void validate() const;
};

// Canonical parenthesis encoding; equal strings mean equal ordered trees.
std::string ordered_encoding(const OrderedTree& t);

// Tree of depth <= k into which every ordered tree with at most n leaves and
// depth at most k embeds. Children recurse as: children for n/2, one fresh
// child one level shallower, children for n - n/2 - 1.
OrderedTree build_universal_tree(int n, int k);

// The (n', k') parameters recorded during construction, indexed by node.
// Trees that were not built by build_universal_tree are rejected.
std::vector<std::pair<int, int>> annotate_subtrees(const OrderedTree& u);

// phi maps each node of s to a node of t: root to root, children to distinct
// children of the image, preserving child order.
std::optional<std::vector<int>> find_embedding(const OrderedTree& s, const OrderedTree& t);
bool validate_embedding(const OrderedTree& s, const OrderedTree& t, const std::vector<int>& phi,
                        std::string* why = nullptr);

// Every ordered tree with at most max_leaves leaves and depth at most
// max_depth, each shape once. Capped at max_leaves <= 5, max_depth <= 4.
std::vector<OrderedTree> enumerate_ordered_trees(int max_leaves, int max_depth);

// Greedy left-to-right pick of distinct root children whose recorded capacity
// n' covers each demand in turn; absent when the demands cannot be met.
std::optional<std::vector<int>> select_children(const OrderedTree& u,
                                                const std::vector<int>& demands);

OrderedTree parse_ordered_tree(const std::string& text);
std::string write_ordered_tree(const OrderedTree& t);

} // namespace csplab
