#include "csplab/structure.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "csplab/textio.hpp"

namespace csplab {

Graph::Graph(int n_, std::vector<std::pair<int, int>> edges_) : n(n_) {
    if (n < 0) throw InputError("negative vertex count");
    for (auto& [u, v] : edges_) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw InputError("edge endpoint out of range: " + std::to_string(u) + " " +
                             std::to_string(v));
        if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    edges = std::move(edges_);
}

bool Graph::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    return adj;
}

std::vector<std::vector<int>> Graph::components() const {
    auto adj = adjacency();
    std::vector<char> seen(n, 0);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::vector<int> comp, stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

bool Graph::is_acyclic() const {
    // A simple graph is a forest iff every component has |E| = |V| - 1.
    auto comps = components();
    size_t total = 0;
    for (auto& c : comps) total += c.size();
    return edges.size() + comps.size() == total;
}

Graph parse_graph(const std::string& text) {
    auto lines = tokenize_text(text);
    if (lines.empty()) throw InputError("empty graph file");
    const Line& head = lines[0];
    if (head.tok(0, "header") != "graph") head.fail("expected 'graph <n>'");
    int n = head.num(1, "vertex count");
    std::vector<std::pair<int, int>> edges;
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tokens[0] != "edge") l.fail("expected 'edge <u> <v>'");
        int u = l.num(1, "endpoint"), v = l.num(2, "endpoint");
        if (u < 0 || v < 0 || u >= n || v >= n) l.fail("endpoint out of range");
        if (u == v) l.fail("self-loop");
        edges.emplace_back(u, v);
    }
    return Graph(n, std::move(edges));
}

std::string write_graph(const Graph& g) {
    std::ostringstream out;
    out << "graph " << g.n << "\n";
    for (auto [u, v] : g.edges) out << "edge " << u << " " << v << "\n";
    return out.str();
}

std::vector<int> EliminationForest::roots() const {
    std::vector<int> r;
    for (int v = 0; v < size(); ++v)
        if (parent[v] == -1) r.push_back(v);
    return r;
}

std::vector<std::vector<int>> EliminationForest::children() const {
    std::vector<std::vector<int>> ch(size());
    for (int v = 0; v < size(); ++v)
        if (parent[v] >= 0) ch[parent[v]].push_back(v);
    return ch;
}

std::vector<int> EliminationForest::ancestors(int v) const {
    if (v < 0 || v >= size() || parent[v] == -2)
        throw InputError("vertex not in forest: " + std::to_string(v));
    std::vector<int> chain;
    int cur = v;
    while (cur != -1) {
        if (cur < 0 || cur >= size() || parent[cur] == -2 || int(chain.size()) > size())
            throw InputError("broken parent chain at vertex " + std::to_string(v));
        chain.push_back(cur);
        cur = parent[cur];
    }
    return chain;
}

int EliminationForest::depth_of(int v) const { return int(ancestors(v).size()); }

int EliminationForest::depth() const {
    int d = 0;
    for (int v = 0; v < size(); ++v)
        if (parent[v] != -2) d = std::max(d, depth_of(v));
    return d;
}

bool validate_elimination_forest(const Graph& g, const EliminationForest& f, std::string* why) {
    auto reject = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (f.size() != g.n) return reject("forest size differs from vertex count");
    for (int v = 0; v < g.n; ++v) {
        if (f.parent[v] == -2) return reject("vertex missing from forest");
        if (f.parent[v] < -1 || f.parent[v] >= g.n) return reject("parent out of range");
    }
    for (int v = 0; v < g.n; ++v) {
        // walks to a root or trips the length guard on a cycle
        try {
            f.ancestors(v);
        } catch (const InputError& e) {
            return reject(e.what());
        }
    }
    for (auto [u, v] : g.edges) {
        auto au = f.ancestors(u);
        if (std::find(au.begin(), au.end(), v) != au.end()) continue;
        auto av = f.ancestors(v);
        if (std::find(av.begin(), av.end(), u) != av.end()) continue;
        return reject("edge " + std::to_string(u) + "-" + std::to_string(v) +
                      " joins unrelated vertices");
    }
    return true;
}

namespace {

constexpr int kSubsetCap = 20;

// Bitmask view of a graph, for the exact algorithms below. Only usable for
// |V| <= 20; callers check and raise ResourceError.
struct MaskGraph {
    int n;
    std::vector<uint32_t> adj;

    explicit MaskGraph(const Graph& g) : n(g.n), adj(size_t(g.n), 0) {
        for (auto [u, v] : g.edges) {
            adj[u] |= 1u << v;
            adj[v] |= 1u << u;
        }
    }

    uint32_t component_of(uint32_t mask, int start) const {
        uint32_t comp = 1u << start, frontier = comp;
        while (frontier) {
            uint32_t grow = 0;
            for (uint32_t f = frontier; f; f &= f - 1) grow |= adj[std::countr_zero(f)];
            grow &= mask & ~comp;
            comp |= grow;
            frontier = grow;
        }
        return comp;
    }

    std::vector<uint32_t> components(uint32_t mask) const {
        std::vector<uint32_t> out;
        while (mask) {
            uint32_t c = component_of(mask, std::countr_zero(mask));
            out.push_back(c);
            mask &= ~c;
        }
        return out;
    }

    int edges_within(uint32_t mask) const {
        int cnt = 0;
        for (uint32_t f = mask; f; f &= f - 1) cnt += std::popcount(adj[std::countr_zero(f)] & mask);
        return cnt / 2;
    }

    bool acyclic(uint32_t mask) const {
        int verts = std::popcount(mask);
        return edges_within(mask) + int(components(mask).size()) == verts;
    }
};

void require_subset_scale(const Graph& g, const char* op) {
    if (g.n > kSubsetCap)
        throw ResourceError(std::string(op) + ": graph has " + std::to_string(g.n) +
                            " vertices, cap is " + std::to_string(kSubsetCap));
}

struct TdSolver {
    MaskGraph mg;
    // connected mask -> (treedepth, root chosen for the witness)
    std::unordered_map<uint32_t, std::pair<int, int>> memo;

    explicit TdSolver(const Graph& g) : mg(g) {}

    int td_connected(uint32_t mask) {
        if (std::popcount(mask) == 1) return 1;
        auto it = memo.find(mask);
        if (it != memo.end()) return it->second.first;
        int best = INT_MAX, bestv = -1;
        for (uint32_t m = mask; m; m &= m - 1) {
            int v = std::countr_zero(m);
            int sub = td(mask & ~(1u << v));
            if (1 + sub < best) {  // strict: ties keep the smallest root
                best = 1 + sub;
                bestv = v;
            }
        }
        memo.emplace(mask, std::make_pair(best, bestv));
        return best;
    }

    int td(uint32_t mask) {
        int r = 0;
        for (uint32_t c : mg.components(mask)) r = std::max(r, td_connected(c));
        return r;
    }

    void witness(uint32_t mask, int above, std::vector<int>& parent) {
        for (uint32_t c : mg.components(mask)) {
            if (std::popcount(c) == 1) {
                parent[std::countr_zero(c)] = above;
                continue;
            }
            td_connected(c);
            int v = memo.at(c).second;
            parent[v] = above;
            witness(c & ~(1u << v), v, parent);
        }
    }
};

// Lexicographic enumeration of sorted index tuples; returns false when done.
bool next_combination(std::vector<int>& c, int n) {
    int s = int(c.size());
    for (int i = s - 1; i >= 0; --i) {
        if (c[i] < n - s + i) {
            ++c[i];
            for (int j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Runs fn on each size-s subset of 0..n-1 in lexicographic order until it
// returns true; reports whether any did.
bool for_each_combination(int n, int s, const std::function<bool(const std::vector<int>&)>& fn) {
    if (s > n) return false;
    std::vector<int> c(static_cast<size_t>(s));
    for (int i = 0; i < s; ++i) c[i] = i;
    if (s == 0) return fn(c);
    while (true) {
        if (fn(c)) return true;
        if (!next_combination(c, n)) return false;
    }
}

uint32_t mask_of(const std::vector<int>& vs) {
    uint32_t m = 0;
    for (int v : vs) m |= 1u << v;
    return m;
}

} // namespace

std::pair<int, EliminationForest> treedepth_exact(const Graph& g) {
    require_subset_scale(g, "treedepth_exact");
    EliminationForest f;
    f.parent.assign(size_t(g.n), -1);
    if (g.n == 0) return {0, f};
    TdSolver solver(g);
    uint32_t full = (g.n == 32) ? ~0u : ((1u << g.n) - 1);
    int depth = solver.td(full);
    solver.witness(full, -1, f.parent);
    return {depth, f};
}

std::optional<std::vector<int>> vertex_cover_exact(const Graph& g, int k) {
    require_subset_scale(g, "vertex_cover_exact");
    MaskGraph mg(g);
    std::optional<std::vector<int>> found;
    for (int s = 0; s <= std::min(k, g.n) && !found; ++s) {
        for_each_combination(g.n, s, [&](const std::vector<int>& c) {
            uint32_t w = mask_of(c);
            for (auto [u, v] : g.edges)
                if (!((w >> u) & 1) && !((w >> v) & 1)) return false;
            found = c;
            return true;
        });
    }
    return found;
}

std::optional<std::vector<int>> feedback_vertex_set_exact(const Graph& g, int k) {
    require_subset_scale(g, "feedback_vertex_set_exact");
    MaskGraph mg(g);
    uint32_t full = (g.n == 0) ? 0 : ((1u << g.n) - 1);
    std::optional<std::vector<int>> found;
    for (int s = 0; s <= std::min(k, g.n) && !found; ++s) {
        for_each_combination(g.n, s, [&](const std::vector<int>& c) {
            if (!mg.acyclic(full & ~mask_of(c))) return false;
            found = c;
            return true;
        });
    }
    return found;
}

std::optional<Modulator> modulator_to_treedepth(const Graph& g, int d, int k) {
    require_subset_scale(g, "modulator_to_treedepth");
    if (d < 0) throw InputError("negative depth bound");
    TdSolver solver(g);
    uint32_t full = (g.n == 0) ? 0 : ((1u << g.n) - 1);
    std::optional<std::vector<int>> found;
    for (int s = 0; s <= std::min(k, g.n) && !found; ++s) {
        for_each_combination(g.n, s, [&](const std::vector<int>& c) {
            if (solver.td(full & ~mask_of(c)) > d) return false;
            found = c;
            return true;
        });
    }
    if (!found) return std::nullopt;
    Modulator mod;
    mod.vertices = *found;
    mod.forest.parent.assign(size_t(g.n), -2);
    solver.witness(full & ~mask_of(*found), -1, mod.forest.parent);
    return mod;
}

int FatEliminationTree::depth() const {
    std::vector<int> d(parent.size(), 0);
    int best = 0;
    for (int v = 0; v < size(); ++v) {  // parents precede children (preorder ids)
        d[v] = parent[v] < 0 ? 1 : d[parent[v]] + 1;
        best = std::max(best, d[v]);
    }
    return best;
}

int FatEliminationTree::width() const {
    size_t w = 0;
    for (auto& b : bags) w = std::max(w, b.size());
    return int(w);
}

bool validate_fat_elimination_tree(const Graph& g, const FatEliminationTree& t, int d, int k,
                                   std::string* why) {
    auto reject = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (t.parent.size() != t.bags.size()) return reject("bag count differs from node count");
    if (t.size() == 0) return reject("fat tree needs at least a root");
    if (t.parent[0] != -1) return reject("node 0 must be the root");
    std::vector<int> owner(size_t(g.n), -1);
    for (int node = 0; node < t.size(); ++node) {
        if (node > 0 && (t.parent[node] < 0 || t.parent[node] >= node))
            return reject("parents must precede children");
        if (int(t.bags[node].size()) > k) return reject("bag too large");
        for (int v : t.bags[node]) {
            if (v < 0 || v >= g.n) return reject("bag vertex out of range");
            if (owner[v] != -1) return reject("vertex in two bags");
            owner[v] = node;
        }
    }
    for (int v = 0; v < g.n; ++v)
        if (owner[v] == -1) return reject("vertex in no bag");
    if (t.depth() > d) return reject("tree too deep");
    auto is_ancestor = [&](int a, int b) {  // a == b allowed
        while (b != -1) {
            if (a == b) return true;
            b = t.parent[b];
        }
        return false;
    };
    for (auto [u, v] : g.edges) {
        int bu = owner[u], bv = owner[v];
        if (!is_ancestor(bu, bv) && !is_ancestor(bv, bu))
            return reject("edge " + std::to_string(u) + "-" + std::to_string(v) +
                          " crosses unrelated bags");
    }
    return true;
}

namespace {

struct FatSolver {
    MaskGraph mg;
    int k;
    // (mask, depth) -> chosen root bag, or nullopt if impossible
    std::unordered_map<uint64_t, std::optional<uint32_t>> memo;

    FatSolver(const Graph& g, int k_) : mg(g), k(k_) {}

    static uint64_t key(uint32_t mask, int d) { return uint64_t(mask) | (uint64_t(d) << 32); }

    std::optional<uint32_t> solve(uint32_t mask, int d) {
        if (d <= 1) {
            if (std::popcount(mask) <= k) return mask;
            return std::nullopt;
        }
        auto it = memo.find(key(mask, d));
        if (it != memo.end()) return it->second;
        std::optional<uint32_t> result;
        std::vector<int> verts;
        for (uint32_t m = mask; m; m &= m - 1) verts.push_back(std::countr_zero(m));
        int nv = int(verts.size());
        for (int s = 0; s <= std::min(k, nv) && !result; ++s) {
            for_each_combination(nv, s, [&](const std::vector<int>& c) {
                uint32_t u = 0;
                for (int i : c) u |= 1u << verts[size_t(i)];
                for (uint32_t comp : mg.components(mask & ~u))
                    if (!solve(comp, d - 1)) return false;
                result = u;
                return true;
            });
        }
        memo.emplace(key(mask, d), result);
        return result;
    }

    void build(uint32_t mask, int d, int above, FatEliminationTree& t) {
        uint32_t bag = *solve(mask, d);
        int node = t.size();
        t.parent.push_back(above);
        std::vector<int> vs;
        for (uint32_t m = bag; m; m &= m - 1) vs.push_back(std::countr_zero(m));
        t.bags.push_back(std::move(vs));
        if (d > 1)
            for (uint32_t comp : mg.components(mask & ~bag)) build(comp, d - 1, node, t);
    }
};

} // namespace

std::optional<FatEliminationTree> fat_elimination_tree(const Graph& g, int d, int k) {
    require_subset_scale(g, "fat_elimination_tree");
    if (d < 1) throw InputError("depth bound must be at least 1");
    if (k < 0) throw InputError("negative width bound");
    FatSolver solver(g, k);
    uint32_t full = (g.n == 0) ? 0 : ((1u << g.n) - 1);
    if (!solver.solve(full, d)) return std::nullopt;
    FatEliminationTree t;
    solver.build(full, d, -1, t);
    return t;
}

int d_fold_vc_number(const Graph& g, int d) {
    require_subset_scale(g, "d_fold_vc_number");
    if (d < 1) throw InputError("depth bound must be at least 1");
    for (int k = 0; k <= g.n; ++k)
        if (fat_elimination_tree(g, d, k)) return k;
    return g.n;  // unreachable: k = n always admits the one-bag tree
}

RootedTree RootedTree::from_parents(const std::vector<int>& parent) {
    RootedTree t;
    t.parent = parent;
    int n = int(parent.size());
    t.children.assign(size_t(n), {});
    for (int v = 0; v < n; ++v) {
        int p = parent[v];
        if (p == -1) {
            if (t.root != -1) throw InputError("rooted tree with two roots");
            t.root = v;
        } else if (p < 0 || p >= n) {
            throw InputError("parent out of range");
        } else {
            t.children[p].push_back(v);
        }
    }
    if (n > 0 && t.root == -1) throw InputError("rooted tree without a root");
    for (int v = 0; v < n; ++v) {
        int steps = 0, cur = v;
        while (cur != -1) {
            if (++steps > n) throw InputError("parent cycle");
            cur = parent[cur];
        }
    }
    return t;
}

std::vector<int> RootedTree::leaves_preorder() const {
    std::vector<int> out;
    std::function<void(int)> walk = [&](int v) {
        if (children[v].empty()) {
            out.push_back(v);
            return;
        }
        for (int c : children[v]) walk(c);
    };
    if (root != -1) walk(root);
    return out;
}

std::vector<int> RootedTree::ancestors(int v) const {
    std::vector<int> chain;
    while (v != -1) {
        chain.push_back(v);
        v = parent[v];
    }
    return chain;
}

int RootedTree::depth() const {
    int best = 0;
    for (int v = 0; v < size(); ++v) best = std::max(best, int(ancestors(v).size()));
    return best;
}

namespace {

std::string fixed_binary(int value, int width) {
    std::string s(size_t(width), '0');
    for (int i = width - 1; i >= 0; --i, value >>= 1)
        if (value & 1) s[size_t(i)] = '1';
    return s;
}

int ceil_log2(int n) { return (n <= 1) ? 0 : std::bit_width(unsigned(n - 1)); }

std::string common_prefix(const std::string& a, const std::string& b) {
    size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    return a.substr(0, i);
}

} // namespace

EdgeLabeling tree_edge_labeling(const RootedTree& t) {
    EdgeLabeling lab;
    auto leaves = t.leaves_preorder();
    int p = ceil_log2(int(leaves.size()));

    // Leaf interval per node, then eta(v) = longest common prefix of the
    // binary codes of its first and last leaf.
    std::vector<int> lo(size_t(t.size()), -1), hi(size_t(t.size()), -1);
    for (int i = 0; i < int(leaves.size()); ++i) lo[leaves[size_t(i)]] = hi[leaves[size_t(i)]] = i;
    std::function<void(int)> fill = [&](int v) {
        for (int c : t.children[v]) {
            fill(c);
            if (lo[v] == -1 || lo[c] < lo[v]) lo[v] = lo[c];
            if (hi[c] > hi[v]) hi[v] = hi[c];
        }
    };
    if (t.root != -1) fill(t.root);

    auto eta = [&](int v) {
        return common_prefix(fixed_binary(lo[v], p), fixed_binary(hi[v], p));
    };
    for (int v = 0; v < t.size(); ++v) {
        if (v == t.root || t.parent[v] == -1) continue;
        std::string ev = eta(v), eu = eta(t.parent[v]);
        // eta of the parent covers a superset of leaves, so it is a prefix
        lab.labels[{t.parent[v], v}] = ev.substr(eu.size());
    }
    return lab;
}

bool validate_edge_labeling(const RootedTree& t, const EdgeLabeling& lab, std::string* why) {
    auto reject = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    auto leaves = t.leaves_preorder();
    int p = ceil_log2(int(leaves.size()));
    for (int v = 0; v < t.size(); ++v) {
        if (v == t.root) continue;
        if (!lab.labels.count({t.parent[v], v})) return reject("unlabeled edge");
    }
    for (int v = 0; v < t.size(); ++v) {
        auto& ch = t.children[v];
        for (size_t i = 0; i < ch.size(); ++i)
            for (size_t j = i + 1; j < ch.size(); ++j)
                if (lab.labels.at({v, ch[i]}) == lab.labels.at({v, ch[j]}))
                    return reject("equal sibling labels under node " + std::to_string(v));
    }
    for (int i = 0; i < int(leaves.size()); ++i) {
        std::string concat;
        auto chain = t.ancestors(leaves[size_t(i)]);  // leaf .. root
        for (int j = int(chain.size()) - 2; j >= 0; --j)
            concat += lab.labels.at({chain[size_t(j) + 1], chain[size_t(j)]});
        if (concat != fixed_binary(i, p))
            return reject("branch to leaf " + std::to_string(leaves[size_t(i)]) +
                          " spells " + concat + ", want " + fixed_binary(i, p));
    }
    return true;
}

TreeFile parse_tree_file(const std::string& text) {
    auto lines = tokenize_text(text);
    if (lines.empty()) throw InputError("empty tree file");
    const Line& head = lines[0];
    if (head.tok(0, "header") != "tree") head.fail("expected 'tree <n>'");
    int n = head.num(1, "node count");
    if (n < 0) head.fail("negative node count");
    TreeFile t;
    bool have_parents = false;
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        const std::string& kind = l.tokens[0];
        if (kind == "parents") {
            if (int(l.tokens.size()) != n + 1) l.fail("expected " + std::to_string(n) + " parents");
            for (int j = 0; j < n; ++j) {
                int p = l.num(size_t(j) + 1, "parent");
                if (p < -1 || p >= n) l.fail("parent out of range");
                t.parents.push_back(p);
            }
            have_parents = true;
        } else if (kind == "bag") {
            if (!t.bags) t.bags.emplace(size_t(n));
            int node = l.num(1, "node");
            if (node < 0 || node >= n) l.fail("node out of range");
            std::vector<int> bag;
            for (size_t j = 2; j < l.tokens.size(); ++j) bag.push_back(l.num(j, "bag vertex"));
            std::sort(bag.begin(), bag.end());
            (*t.bags)[size_t(node)] = std::move(bag);
        } else if (kind == "label") {
            if (!t.labels) t.labels.emplace();
            int u = l.num(1, "parent"), v = l.num(2, "child");
            std::string bits = l.tok(3, "label bits");
            if (bits == ".") bits.clear();
            for (char c : bits)
                if (c != '0' && c != '1') l.fail("label must be 0/1 bits or '.'");
            (*t.labels)[{u, v}] = bits;
        } else {
            l.fail("unknown directive '" + kind + "'");
        }
    }
    if (!have_parents && n > 0) throw InputError("tree file lacks a parents line");
    if (!have_parents) t.parents.clear();
    return t;
}

std::string write_tree_file(const TreeFile& t) {
    std::ostringstream out;
    out << "tree " << t.parents.size() << "\n";
    if (!t.parents.empty()) {
        out << "parents";
        for (int p : t.parents) out << " " << p;
        out << "\n";
    }
    if (t.bags)
        for (size_t i = 0; i < t.bags->size(); ++i) {
            out << "bag " << i;
            for (int v : (*t.bags)[i]) out << " " << v;
            out << "\n";
        }
    if (t.labels)
        for (auto& [edge, bits] : *t.labels)
            out << "label " << edge.first << " " << edge.second << " "
                << (bits.empty() ? "." : bits) << "\n";
    return out.str();
}

} // namespace csplab
