#include "csplab/reductions.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "csplab/errors.hpp"
#include "csplab/solvers.hpp"
#include "csplab/structure.hpp"

namespace csplab {

namespace {

std::vector<int> checked_vertex_set(int n, const std::vector<int>& vs, const std::string& what) {
    std::vector<int> out = vs;
    std::sort(out.begin(), out.end());
    for (size_t i = 0; i < out.size(); ++i) {
        if (out[i] < 0 || out[i] >= n) throw InputError(what + " out of range");
        if (i > 0 && out[i] == out[i - 1]) throw InputError("duplicate " + what);
    }
    return out;
}

bool in_set(const std::vector<int>& sorted, int v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

void require_cover(const Graph& g, const std::vector<int>& w) {
    for (auto [u, v] : g.edges)
        if (!in_set(w, u) && !in_set(w, v))
            throw InputError("edge " + std::to_string(u) + "-" + std::to_string(v) +
                             " escapes the cover");
}

// v, parent(v), ..., root. Guards against -2 parents and loops.
std::vector<int> chain_up(const std::vector<int>& forest, int v) {
    std::vector<int> out;
    int cur = v;
    while (cur >= 0) {
        out.push_back(cur);
        if (out.size() > forest.size()) throw InputError("forest parent chain loops");
        cur = forest[size_t(cur)];
        if (cur == -2) throw InputError("forest parent may not be a modulator vertex");
    }
    return out;
}

// Parent array over all of g, -2 exactly on the modulator, acyclic, and every
// edge off the modulator joins an ancestor/descendant pair.
void check_partial_forest(const Graph& g, const std::vector<int>& w,
                          const std::vector<int>& forest) {
    if (int(forest.size()) != g.n) throw InputError("modulator forest has wrong size");
    for (int v = 0; v < g.n; ++v) {
        int p = forest[size_t(v)];
        if (in_set(w, v)) {
            if (p != -2) throw InputError("modulator vertices must carry -2 in the forest");
            continue;
        }
        if (p == -2) throw InputError("-2 outside the modulator");
        if (p < -1 || p >= g.n || p == v) throw InputError("forest parent out of range");
        if (p >= 0 && in_set(w, p))
            throw InputError("forest parent may not be a modulator vertex");
    }
    for (int v = 0; v < g.n; ++v)
        if (!in_set(w, v)) chain_up(forest, v);
    for (auto [u, v] : g.edges) {
        if (in_set(w, u) || in_set(w, v)) continue;
        auto cu = chain_up(forest, u);
        if (std::find(cu.begin(), cu.end(), v) != cu.end()) continue;
        auto cv = chain_up(forest, v);
        if (std::find(cv.begin(), cv.end(), u) != cv.end()) continue;
        throw InputError("edge " + std::to_string(u) + "-" + std::to_string(v) +
                         " joins unrelated forest vertices");
    }
}

// Disjunction skeleton of a padded antimonotone formula: one node per OR
// gate, children two formula levels down, negated variables of each term on
// the nodes that own them.
struct DisjNode {
    int parent = -1;
    int term_of_parent = 0;  // 1-based position among the parent's terms
    int terms = 0;
    std::vector<std::vector<int>> term_vars;  // sorted negated variables per term
    std::vector<int> kids;
};

void collect_disjunctions(const NormalizedFormula& f, int or_idx, int parent,
                          int term_of_parent, std::vector<DisjNode>& out) {
    int id = int(out.size());
    out.emplace_back();
    out[size_t(id)].parent = parent;
    out[size_t(id)].term_of_parent = term_of_parent;
    size_t terms = f.nodes[size_t(or_idx)].children.size();
    out[size_t(id)].terms = int(terms);
    out[size_t(id)].term_vars.resize(terms);
    if (parent >= 0) out[size_t(parent)].kids.push_back(id);
    for (size_t j = 0; j < terms; ++j) {
        int term = f.nodes[size_t(or_idx)].children[j];
        if (f.nodes[size_t(term)].kind == NormalizedFormula::Kind::Lit) {
            out[size_t(id)].term_vars[j].push_back(f.nodes[size_t(term)].var);
            continue;
        }
        for (int sub : f.nodes[size_t(term)].children) {
            if (f.nodes[size_t(sub)].kind == NormalizedFormula::Kind::Lit)
                out[size_t(id)].term_vars[j].push_back(f.nodes[size_t(sub)].var);
            else
                collect_disjunctions(f, sub, id, int(j) + 1, out);
        }
    }
    for (auto& tv : out[size_t(id)].term_vars) {
        std::sort(tv.begin(), tv.end());
        tv.erase(std::unique(tv.begin(), tv.end()), tv.end());
    }
}

void check_hardness_inputs(const NormalizedFormula& f, int k, int target) {
    if (k < 0) throw InputError("weight must be nonnegative");
    if (!is_antimonotone(f)) throw InputError("formula must be antimonotone");
    int level = normalization_level(f);
    if (level > target)
        throw InputError("formula level " + std::to_string(level) + " exceeds " +
                         std::to_string(target));
}

BinCspWithModulator degenerate_unsat(int k, const std::string& rule,
                                     const std::string& parameter) {
    BinCspWithModulator out;
    out.instance.n = 1;
    out.instance.domains = {{}};
    out.forest = {-1};
    out.report.rule = rule;
    out.report.parameter = parameter;
    out.report.parameter_value = k;
    out.report.notes.push_back("weight exceeds variable count; canonical unsatisfiable instance");
    return out;
}

std::vector<std::pair<int, int>> distinct_pairs(int n) {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) out.emplace_back(a, b);
    return out;
}

// Shared builder for the forest-modulator and feedback-set hardness maps.
// Vertices 0..k-1 form the clique; vertex k+i is disjunction node i. Value 0
// is the inactive marker on non-root forest vertices.
BinCspWithModulator hardness_build(const NormalizedFormula& f, int k, int target,
                                   const std::string& rule, const std::string& parameter) {
    check_hardness_inputs(f, k, target);
    if (f.num_vars < k) return degenerate_unsat(k, rule, parameter);

    NormalizedFormula padded = pad_to_level(f, target);
    std::vector<DisjNode> nodes;
    for (int child : padded.nodes[size_t(padded.root)].children)
        collect_disjunctions(padded, child, -1, 0, nodes);

    int n = f.num_vars;
    BinCspWithModulator out;
    BinCspInstance& inst = out.instance;
    inst.n = k + int(nodes.size());
    inst.domains.assign(size_t(inst.n), {});
    std::vector<int> wdom(static_cast<size_t>(n));
    std::iota(wdom.begin(), wdom.end(), 0);
    for (int w = 0; w < k; ++w) inst.domains[size_t(w)] = wdom;
    for (size_t i = 0; i < nodes.size(); ++i) {
        std::vector<int> dom;
        if (nodes[i].parent >= 0) dom.push_back(0);
        for (int t = 1; t <= nodes[i].terms; ++t) dom.push_back(t);
        inst.domains[size_t(k) + i] = dom;
    }

    auto allpairs = distinct_pairs(n);
    for (int u = 0; u < k; ++u)
        for (int v = u + 1; v < k; ++v) inst.add_constraint(u, v, allpairs);

    for (size_t i = 0; i < nodes.size(); ++i) {
        int p = nodes[i].parent;
        if (p < 0) continue;
        std::vector<std::pair<int, int>> pairs;
        if (nodes[size_t(p)].parent >= 0) pairs.emplace_back(0, 0);
        for (int t = 1; t <= nodes[size_t(p)].terms; ++t) {
            if (t != nodes[i].term_of_parent) {
                pairs.emplace_back(t, 0);
            } else {
                for (int tc = 1; tc <= nodes[i].terms; ++tc) pairs.emplace_back(t, tc);
            }
        }
        inst.add_constraint(k + p, k + int(i), pairs);
    }

    for (size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].kids.empty()) continue;
        std::vector<std::pair<int, int>> pairs;
        if (nodes[i].parent >= 0)
            for (int x = 0; x < n; ++x) pairs.emplace_back(0, x);
        for (int t = 1; t <= nodes[i].terms; ++t)
            for (int x = 0; x < n; ++x)
                if (!in_set(nodes[i].term_vars[size_t(t) - 1], x)) pairs.emplace_back(t, x);
        for (int w = 0; w < k; ++w) inst.add_constraint(k + int(i), w, pairs);
    }

    out.modulator.resize(size_t(k));
    std::iota(out.modulator.begin(), out.modulator.end(), 0);
    out.forest.assign(size_t(inst.n), -2);
    int depth = 0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        out.forest[size_t(k) + i] = nodes[i].parent < 0 ? -1 : k + nodes[i].parent;
        int len = 1;
        for (int cur = int(i); nodes[size_t(cur)].parent >= 0; cur = nodes[size_t(cur)].parent)
            ++len;
        depth = std::max(depth, len);
    }
    out.report.rule = rule;
    out.report.parameter = parameter;
    out.report.parameter_value = k;
    out.report.notes.push_back("disjunction vertices: " + std::to_string(nodes.size()));
    out.report.notes.push_back("forest depth: " + std::to_string(depth));
    return out;
}

// Exact decision for a precoloring instance: lists, then the elimination
// forest DP on an optimal forest of the graph.
bool solve_precolor_exact(const PrecoloringInstance& pre) {
    ListColoringInstance lc;
    lc.graph = pre.graph;
    lc.colors = pre.colors;
    lc.lists.assign(size_t(pre.graph.n), pre.colors);
    for (auto [v, c] : pre.precolor) lc.lists[size_t(v)] = {c};
    BinCspInstance inst = listcoloring_to_bincsp(lc);
    auto [depth, ef] = treedepth_exact(inst.gaifman());
    (void)depth;
    return solve_by_elimination_forest(inst, ef).has_value();
}

// First conflicting precolored edge, if any.
bool precolored_conflict(const PrecoloringInstance& pre) {
    for (auto [u, v] : pre.graph.edges) {
        auto iu = pre.precolor.find(u);
        auto iv = pre.precolor.find(v);
        if (iu != pre.precolor.end() && iv != pre.precolor.end() && iu->second == iv->second)
            return true;
    }
    return false;
}

} // namespace

BinCspWithModulator wsat3am_to_bincsp_vc(const NormalizedFormula& f, int k) {
    const std::string rule = "wsat3am_to_bincsp_vc";
    const std::string parameter = "vertex cover size";
    check_hardness_inputs(f, k, 3);
    if (f.num_vars < k) return degenerate_unsat(k, rule, parameter);

    NormalizedFormula padded = pad_to_level(f, 3);
    std::vector<std::vector<std::vector<int>>> disj;  // disjunction -> term -> vars
    for (int child : padded.nodes[size_t(padded.root)].children) {
        std::vector<std::vector<int>> terms;
        for (int term : padded.nodes[size_t(child)].children) {
            std::vector<int> vars;
            if (padded.nodes[size_t(term)].kind == NormalizedFormula::Kind::Lit) {
                vars.push_back(padded.nodes[size_t(term)].var);
            } else {
                for (int lit : padded.nodes[size_t(term)].children)
                    vars.push_back(padded.nodes[size_t(lit)].var);
            }
            std::sort(vars.begin(), vars.end());
            vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
            terms.push_back(std::move(vars));
        }
        disj.push_back(std::move(terms));
    }

    int n = f.num_vars;
    int r = int(disj.size());
    BinCspWithModulator out;
    BinCspInstance& inst = out.instance;
    inst.n = k + r;
    inst.domains.assign(size_t(inst.n), {});
    std::vector<int> wdom(static_cast<size_t>(n));
    std::iota(wdom.begin(), wdom.end(), 0);
    for (int w = 0; w < k; ++w) inst.domains[size_t(w)] = wdom;
    for (int i = 0; i < r; ++i) {
        std::vector<int> dom(disj[size_t(i)].size());
        std::iota(dom.begin(), dom.end(), 1);
        inst.domains[size_t(k + i)] = dom;
    }

    auto allpairs = distinct_pairs(n);
    for (int u = 0; u < k; ++u)
        for (int v = u + 1; v < k; ++v) inst.add_constraint(u, v, allpairs);
    for (int i = 0; i < r; ++i) {
        std::vector<std::pair<int, int>> pairs;
        for (size_t t = 0; t < disj[size_t(i)].size(); ++t)
            for (int x = 0; x < n; ++x)
                if (!in_set(disj[size_t(i)][t], x)) pairs.emplace_back(int(t) + 1, x);
        for (int w = 0; w < k; ++w) inst.add_constraint(k + i, w, pairs);
    }

    out.modulator.resize(size_t(k));
    std::iota(out.modulator.begin(), out.modulator.end(), 0);
    out.forest.assign(size_t(inst.n), -1);
    for (int w = 0; w < k; ++w) out.forest[size_t(w)] = -2;
    out.report.rule = rule;
    out.report.parameter = parameter;
    out.report.parameter_value = k;
    out.report.notes.push_back("disjunction vertices: " + std::to_string(r));
    return out;
}

WeightedSatInstance bincsp_vc_to_wsat3(const BinCspInstance& inst,
                                       const std::vector<int>& cover) {
    inst.validate();
    auto w = checked_vertex_set(inst.n, cover, "cover vertex");
    Graph g = inst.gaifman();
    require_cover(g, w);
    auto adj = g.adjacency();

    WeightedSatInstance out;
    out.k = int(w.size());
    std::vector<int> base(size_t(inst.n), -1);
    int total = 0;
    for (int u : w) {
        base[size_t(u)] = total;
        total += int(inst.domains[size_t(u)].size());
        for (int c : inst.domains[size_t(u)])
            out.names.push_back("w" + std::to_string(u) + "=" + std::to_string(c));
    }
    NormalizedFormula& f = out.formula;
    f.num_vars = total;
    auto var_of = [&](int u, int value) {
        const auto& dom = inst.domains[size_t(u)];
        int pos = int(std::lower_bound(dom.begin(), dom.end(), value) - dom.begin());
        return base[size_t(u)] + pos;
    };

    std::vector<int> clauses;
    for (int u : w) {
        std::vector<int> lits;
        for (int c : inst.domains[size_t(u)]) lits.push_back(f.add_lit(var_of(u, c), true));
        clauses.push_back(f.add_or(lits));
    }
    for (auto [u, v] : g.edges) {
        if (!in_set(w, u) || !in_set(w, v)) continue;
        std::vector<int> terms;
        for (auto [a, b] : inst.allowed(u, v))
            terms.push_back(f.add_and({f.add_lit(var_of(u, a), true),
                                       f.add_lit(var_of(v, b), true)}));
        clauses.push_back(f.add_or(terms));
    }
    for (int v = 0; v < inst.n; ++v) {
        if (in_set(w, v)) continue;
        std::vector<int> terms;
        for (int c : inst.domains[size_t(v)]) {
            std::vector<int> lits;
            for (int u : adj[size_t(v)])
                for (int c2 : inst.domains[size_t(u)])
                    if (!inst.pair_allowed(v, u, c, c2))
                        lits.push_back(f.add_lit(var_of(u, c2), false));
            terms.push_back(f.add_and(lits));
        }
        clauses.push_back(f.add_or(terms));
    }
    f.root = f.add_and(clauses);
    return out;
}

BinCspWithModulator wsat2d1am_to_bincsp_forest_modulator(const NormalizedFormula& f,
                                                         int k, int d) {
    if (d < 1) throw InputError("forest depth must be at least 1");
    return hardness_build(f, k, 2 * d + 1, "wsat2d1am_to_bincsp_forest_modulator",
                          "modulator size");
}

WeightedSatInstance bincsp_modtd_to_wsat2d1(const BinCspInstance& inst,
                                            const std::vector<int>& modulator,
                                            const std::vector<int>& forest,
                                            std::size_t family_cap) {
    inst.validate();
    auto w = checked_vertex_set(inst.n, modulator, "modulator vertex");
    Graph g = inst.gaifman();
    check_partial_forest(g, w, forest);

    BinCspInstance work = inst;
    for (int v = 0; v < inst.n; ++v) {
        if (in_set(w, v)) continue;
        int p = forest[size_t(v)];
        if (p < 0 || work.has_edge(v, p)) continue;
        std::vector<std::pair<int, int>> full;
        for (int a : work.domains[size_t(v)])
            for (int b : work.domains[size_t(p)]) full.emplace_back(a, b);
        work.add_constraint(v, p, full);
    }

    // root..v chains, children, and vertices ordered parents first
    std::vector<std::vector<int>> chain(size_t(inst.n)), kids(size_t(inst.n));
    std::vector<int> order;
    for (int v = 0; v < inst.n; ++v) {
        if (in_set(w, v)) continue;
        auto up = chain_up(forest, v);
        chain[size_t(v)].assign(up.rbegin(), up.rend());
        order.push_back(v);
        if (forest[size_t(v)] >= 0) kids[size_t(forest[size_t(v)])].push_back(v);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (chain[size_t(a)].size() != chain[size_t(b)].size())
            return chain[size_t(a)].size() < chain[size_t(b)].size();
        return a < b;
    });

    // every assignment of the chain compatible with the constraints among it
    auto compatible = [&](int v, int value, const std::vector<int>& upvals,
                          const std::vector<int>& upchain) {
        for (size_t i = 0; i < upchain.size(); ++i)
            if (work.has_edge(upchain[i], v) &&
                !work.pair_allowed(upchain[i], v, upvals[i], value))
                return false;
        return true;
    };
    std::vector<std::vector<std::vector<int>>> fam(size_t(inst.n));
    for (int v : order) {
        int p = forest[size_t(v)];
        if (p < 0) {
            for (int c : work.domains[size_t(v)]) fam[size_t(v)].push_back({c});
        } else {
            for (const auto& fv : fam[size_t(p)])
                for (int c : work.domains[size_t(v)])
                    if (compatible(v, c, fv, chain[size_t(p)])) {
                        auto ext = fv;
                        ext.push_back(c);
                        fam[size_t(v)].push_back(std::move(ext));
                    }
        }
        if (fam[size_t(v)].size() > family_cap)
            throw ResourceError("ancestor assignment family for vertex " + std::to_string(v) +
                                " exceeds cap " + std::to_string(family_cap));
    }

    WeightedSatInstance out;
    out.k = int(w.size());
    std::vector<int> base(size_t(inst.n), -1);
    int total = 0;
    for (int u : w) {
        base[size_t(u)] = total;
        total += int(inst.domains[size_t(u)].size());
        for (int c : inst.domains[size_t(u)])
            out.names.push_back("w" + std::to_string(u) + "=" + std::to_string(c));
    }
    NormalizedFormula& fml = out.formula;
    fml.num_vars = total;
    auto var_of = [&](int u, int value) {
        const auto& dom = inst.domains[size_t(u)];
        int pos = int(std::lower_bound(dom.begin(), dom.end(), value) - dom.begin());
        return base[size_t(u)] + pos;
    };

    std::vector<int> clauses;
    for (int u : w) {
        std::vector<int> lits;
        for (int c : inst.domains[size_t(u)]) lits.push_back(fml.add_lit(var_of(u, c), true));
        clauses.push_back(fml.add_or(lits));
    }
    for (auto [u, v] : g.edges) {
        if (!in_set(w, u) || !in_set(w, v)) continue;
        std::vector<int> terms;
        for (auto [a, b] : inst.allowed(u, v))
            terms.push_back(fml.add_and({fml.add_lit(var_of(u, a), true),
                                         fml.add_lit(var_of(v, b), true)}));
        clauses.push_back(fml.add_or(terms));
    }

    // conjunction holding for an ancestor assignment iff it extends below v
    // without conflicting with the modulator choices
    std::function<int(int, const std::vector<int>&)> build =
        [&](int v, const std::vector<int>& fv) -> int {
        std::set<int> conflict_vars;
        for (size_t i = 0; i < chain[size_t(v)].size(); ++i) {
            int x = chain[size_t(v)][i];
            for (int u : w) {
                if (!work.has_edge(x, u)) continue;
                for (int c : inst.domains[size_t(u)])
                    if (!work.pair_allowed(x, u, fv[i], c)) conflict_vars.insert(var_of(u, c));
            }
        }
        std::vector<int> parts;
        for (int var : conflict_vars) parts.push_back(fml.add_lit(var, false));
        for (int y : kids[size_t(v)]) {
            std::vector<int> terms;
            for (int c : work.domains[size_t(y)])
                if (compatible(y, c, fv, chain[size_t(v)])) {
                    auto ext = fv;
                    ext.push_back(c);
                    terms.push_back(build(y, ext));
                }
            parts.push_back(fml.add_or(terms));
        }
        return fml.add_and(parts);
    };
    for (int r : order) {
        if (forest[size_t(r)] >= 0) continue;
        std::vector<int> terms;
        for (const auto& fv : fam[size_t(r)]) terms.push_back(build(r, fv));
        clauses.push_back(fml.add_or(terms));
    }
    fml.root = fml.add_and(clauses);
    return out;
}

BinCspWithModulator wsatam_to_bincsp_fvs(const NormalizedFormula& f, int k) {
    int level = normalization_level(f);
    int target = std::max(3, level % 2 == 0 ? level + 1 : level);
    return hardness_build(f, k, target, "wsatam_to_bincsp_fvs", "feedback vertex set size");
}

CircuitWithBudget bincsp_fvs_to_circuit(const BinCspInstance& inst,
                                        const std::vector<int>& fvs) {
    inst.validate();
    auto w = checked_vertex_set(inst.n, fvs, "feedback vertex");
    Graph g = inst.gaifman();
    auto adj = g.adjacency();

    // rooted trees over the remaining vertices: scan ascending, so each
    // component is rooted at its smallest vertex
    std::vector<int> parent(size_t(inst.n), -1);
    std::vector<std::vector<int>> kids(size_t(inst.n));
    std::vector<int> roots, bfs;
    std::vector<char> seen(size_t(inst.n), 0);
    for (int v = 0; v < inst.n; ++v) {
        if (in_set(w, v) || seen[size_t(v)]) continue;
        roots.push_back(v);
        seen[size_t(v)] = 1;
        size_t head = bfs.size();
        bfs.push_back(v);
        while (head < bfs.size()) {
            int u = bfs[head++];
            for (int x : adj[size_t(u)]) {
                if (in_set(w, x)) continue;
                if (seen[size_t(x)]) {
                    if (x != parent[size_t(u)])
                        throw InputError("vertices off the feedback set form a cycle");
                    continue;
                }
                seen[size_t(x)] = 1;
                parent[size_t(x)] = u;
                kids[size_t(u)].push_back(x);
                bfs.push_back(x);
            }
        }
    }

    CircuitWithBudget out;
    out.k = int(w.size());
    BooleanCircuit& c = out.circuit;
    std::vector<int> base(size_t(inst.n), -1);
    int total = 0;
    for (int u : w) {
        base[size_t(u)] = total;
        total += int(inst.domains[size_t(u)].size());
    }
    c.num_vars = total;
    for (int var = 0; var < total; ++var) c.add_input(var);
    auto var_of = [&](int u, int value) {
        const auto& dom = inst.domains[size_t(u)];
        int pos = int(std::lower_bound(dom.begin(), dom.end(), value) - dom.begin());
        return base[size_t(u)] + pos;
    };

    std::vector<int> part1;
    for (int u : w) {
        std::vector<int> ins;
        for (int cv : inst.domains[size_t(u)]) ins.push_back(var_of(u, cv));
        part1.push_back(c.add_or(ins));
    }
    for (auto [u, v] : g.edges) {
        if (!in_set(w, u) || !in_set(w, v)) continue;
        std::vector<int> ins;
        for (auto [a, b] : inst.allowed(u, v))
            ins.push_back(c.add_and({var_of(u, a), var_of(v, b)}));
        part1.push_back(c.add_or(ins));
    }
    int part1_gate = c.add_and(part1);

    // one gate per (tree vertex, value), children before parents
    std::vector<std::vector<int>> ygate(size_t(inst.n));
    for (auto it = bfs.rbegin(); it != bfs.rend(); ++it) {
        int v = *it;
        for (int cv : inst.domains[size_t(v)]) {
            std::vector<int> ins;
            for (int u : adj[size_t(v)]) {
                if (!in_set(w, u)) continue;
                std::vector<int> opts;
                for (int c2 : inst.domains[size_t(u)])
                    if (inst.pair_allowed(v, u, cv, c2)) opts.push_back(var_of(u, c2));
                ins.push_back(c.add_or(opts));
            }
            for (int y : kids[size_t(v)]) {
                std::vector<int> opts;
                for (size_t pos = 0; pos < inst.domains[size_t(y)].size(); ++pos)
                    if (inst.pair_allowed(v, y, cv, inst.domains[size_t(y)][pos]))
                        opts.push_back(ygate[size_t(y)][pos]);
                ins.push_back(c.add_or(opts));
            }
            ygate[size_t(v)].push_back(c.add_and(ins));
        }
    }
    std::vector<int> part2;
    for (int r : roots) part2.push_back(c.add_or(ygate[size_t(r)]));
    int part2_gate = c.add_and(part2);
    c.output = c.add_and({part1_gate, part2_gate});

    out.report.rule = "bincsp_fvs_to_circuit";
    out.report.parameter = "weight budget";
    out.report.parameter_value = out.k;
    out.report.notes.push_back("trees: " + std::to_string(roots.size()));
    out.report.notes.push_back("gates: " + std::to_string(c.gates.size()));
    return out;
}

WeightedSatInstance listcoloring_vc_to_wsat2(const ListColoringInstance& lc,
                                             const std::vector<int>& cover) {
    lc.validate();
    auto w = checked_vertex_set(lc.graph.n, cover, "cover vertex");
    require_cover(lc.graph, w);
    auto adj = lc.graph.adjacency();
    int m = int(lc.colors.size());
    auto cpos = [&](int token) {
        return int(std::lower_bound(lc.colors.begin(), lc.colors.end(), token) -
                   lc.colors.begin());
    };

    // logical vertex: a sorted set of flat color codes and a variable base
    struct LVert {
        std::vector<int> cols;
        int base = 0;
    };
    WeightedSatInstance out;
    NormalizedFormula& f = out.formula;
    int total = 0;
    auto make_vert = [&](std::vector<int> cols, const std::string& name,
                         auto&& describe) {
        LVert lv;
        lv.cols = std::move(cols);
        lv.base = total;
        total += int(lv.cols.size());
        for (int code : lv.cols) out.names.push_back(name + "=" + describe(code));
        return lv;
    };
    auto plain = [&](int code) { return std::to_string(lc.colors[size_t(code)]); };
    auto paired = [&](int code) {
        return "(" + std::to_string(code / m) + "," + std::to_string(code % m) + ")";
    };
    auto list_codes = [&](int v) {
        std::vector<int> cols;
        for (int token : lc.lists[size_t(v)]) cols.push_back(cpos(token));
        return cols;
    };

    std::vector<int> clauses;
    auto at_least_one = [&](const LVert& u) {
        std::vector<int> lits;
        for (size_t i = 0; i < u.cols.size(); ++i)
            lits.push_back(f.add_lit(u.base + int(i), true));
        clauses.push_back(f.add_or(lits));
    };
    auto forbid = [&](const LVert& a, const LVert& b, auto&& allowed) {
        for (size_t ia = 0; ia < a.cols.size(); ++ia)
            for (size_t ib = 0; ib < b.cols.size(); ++ib)
                if (!allowed(a.cols[ia], b.cols[ib]))
                    clauses.push_back(f.add_or({f.add_lit(a.base + int(ia), false),
                                                f.add_lit(b.base + int(ib), false)}));
    };

    std::map<int, LVert> wvert;
    for (int u : w) wvert.emplace(u, make_vert(list_codes(u), "w" + std::to_string(u), plain));
    for (auto& [u, lv] : wvert) at_least_one(lv);
    for (auto [u, v] : lc.graph.edges)
        if (in_set(w, u) && in_set(w, v))
            forbid(wvert.at(u), wvert.at(v), [](int a, int b) { return a != b; });

    std::map<std::vector<int>, std::vector<int>> classes;
    for (int v = 0; v < lc.graph.n; ++v) {
        if (in_set(w, v)) continue;
        classes[adj[size_t(v)]].push_back(v);
    }

    int kprime = int(w.size());
    int gi = 0;
    for (const auto& [nb, members] : classes) {
        int kj = int(nb.size());
        if (kj == 0) {
            for (int v : members)
                if (lc.lists[size_t(v)].empty()) clauses.push_back(f.add_or({}));
            continue;
        }
        std::string gp = "g" + std::to_string(gi++);
        std::vector<int> allc(static_cast<size_t>(m));
        std::iota(allc.begin(), allc.end(), 0);
        std::vector<int> pairs_up, pairs_down, tracker_cols;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                if (a <= b) pairs_up.push_back(a * m + b);
                if (a >= b) pairs_down.push_back(a * m + b);
            }
        for (int s = 0; s < kj; ++s)
            for (int cc = 0; cc < m; ++cc) tracker_cols.push_back(s * m + cc);

        std::vector<LVert> copy, srt, trk, itv;
        for (int i = 0; i < kj; ++i)
            copy.push_back(make_vert(list_codes(nb[size_t(i)]),
                                     gp + ".w" + std::to_string(nb[size_t(i)]), plain));
        for (int i = 0; i < kj; ++i)
            srt.push_back(make_vert(allc, gp + ".s" + std::to_string(i), plain));
        for (int i = 0; i < kj; ++i)
            trk.push_back(make_vert(tracker_cols, gp + ".t" + std::to_string(i), paired));
        for (int i = 0; i + 1 < kj; ++i)
            itv.push_back(make_vert(pairs_up, gp + ".i" + std::to_string(i), paired));
        LVert wrap = make_vert(pairs_down, gp + ".wrap", paired);

        for (auto& lv : copy) at_least_one(lv);
        for (auto& lv : srt) at_least_one(lv);
        for (auto& lv : trk) at_least_one(lv);
        for (auto& lv : itv) at_least_one(lv);
        at_least_one(wrap);

        for (int i = 0; i < kj; ++i)
            for (int i2 = i + 1; i2 < kj; ++i2)
                if (lc.graph.has_edge(nb[size_t(i)], nb[size_t(i2)]))
                    forbid(copy[size_t(i)], copy[size_t(i2)],
                           [](int a, int b) { return a != b; });
        for (int i = 0; i < kj; ++i)
            for (int i2 = 0; i2 < kj; ++i2)
                forbid(copy[size_t(i)], trk[size_t(i2)], [&, i](int a, int t) {
                    return t / m != i || a == t % m;
                });
        for (int i = 0; i < kj; ++i)
            for (int i2 = i + 1; i2 < kj; ++i2)
                forbid(trk[size_t(i)], trk[size_t(i2)],
                       [&](int t, int t2) { return t / m != t2 / m; });
        for (int i = 0; i < kj; ++i)
            forbid(srt[size_t(i)], trk[size_t(i)], [&](int a, int t) { return a == t % m; });
        for (int i = 0; i + 1 < kj; ++i) {
            forbid(srt[size_t(i)], itv[size_t(i)], [&](int a, int t) { return a == t / m; });
            forbid(srt[size_t(i) + 1], itv[size_t(i)],
                   [&](int b, int t) { return b == t % m; });
        }
        forbid(srt[size_t(kj) - 1], wrap, [&](int a, int t) { return a == t / m; });
        forbid(srt[0], wrap, [&](int b, int t) { return b == t % m; });
        for (int i = 0; i < kj; ++i)
            forbid(copy[size_t(i)], wvert.at(nb[size_t(i)]),
                   [](int a, int b) { return a == b; });

        // some list color of v lands strictly inside a stored gap
        for (int v : members) {
            std::set<int> vars;
            for (int token : lc.lists[size_t(v)]) {
                int cc = cpos(token);
                for (auto& lv : itv)
                    for (int code : lv.cols)
                        if (code / m < cc && cc < code % m) vars.insert(lv.base + int(
                            std::lower_bound(lv.cols.begin(), lv.cols.end(), code) -
                            lv.cols.begin()));
                for (int code : wrap.cols)
                    if (cc > code / m || cc < code % m) vars.insert(wrap.base + int(
                        std::lower_bound(wrap.cols.begin(), wrap.cols.end(), code) -
                        wrap.cols.begin()));
            }
            std::vector<int> lits;
            for (int var : vars) lits.push_back(f.add_lit(var, true));
            clauses.push_back(f.add_or(lits));
        }
        kprime += 4 * kj;
    }

    f.num_vars = total;
    f.root = f.add_and(clauses);
    out.k = kprime;
    return out;
}

PrecoloringWithModulator listcoloring_to_precolext(const ListColoringInstance& lc,
                                                   const std::vector<int>& modulator,
                                                   const std::vector<int>& forest) {
    lc.validate();
    auto w = checked_vertex_set(lc.graph.n, modulator, "modulator vertex");
    check_partial_forest(lc.graph, w, forest);

    PrecoloringWithModulator out;
    out.instance.colors = lc.colors;
    out.modulator = w;
    out.forest = forest;
    auto edges = lc.graph.edges;
    int next = lc.graph.n;
    int pendants = 0;
    for (int v = 0; v < lc.graph.n; ++v) {
        std::vector<int> missing;
        std::set_difference(lc.colors.begin(), lc.colors.end(),
                            lc.lists[size_t(v)].begin(), lc.lists[size_t(v)].end(),
                            std::back_inserter(missing));
        for (int token : missing) {
            int id = next++;
            ++pendants;
            edges.emplace_back(v, id);
            out.instance.precolor[id] = token;
            out.forest.push_back(in_set(w, v) ? -1 : v);
        }
    }
    out.instance.graph = Graph(next, std::move(edges));
    out.instance.validate();

    int depth = 0;
    for (int v = 0; v < next; ++v)
        if (!in_set(w, v)) depth = std::max(depth, int(chain_up(out.forest, v).size()));
    out.report.rule = "listcoloring_to_precolext";
    out.report.parameter = "modulator size";
    out.report.parameter_value = int(w.size());
    out.report.notes.push_back("pendants added: " + std::to_string(pendants));
    out.report.notes.push_back("forest depth: " + std::to_string(depth));
    return out;
}

KernelResult precolext_vc_kernel(const PrecoloringInstance& pre,
                                 const std::vector<int>& cover) {
    pre.validate();
    auto s = checked_vertex_set(pre.graph.n, cover, "cover vertex");
    require_cover(pre.graph, s);
    int k = int(s.size());
    int m = int(pre.colors.size());

    KernelResult res;
    res.report.rule = "precolext_vc_kernel";
    res.report.parameter = "vertex cover size";
    res.report.parameter_value = k;
    if (m <= k) {
        res.decided = true;
        res.satisfiable = solve_precolor_exact(pre);
        res.report.notes.push_back("solved directly: colors fit the cover budget");
        return res;
    }
    if (precolored_conflict(pre)) {
        res.decided = true;
        res.satisfiable = false;
        res.report.notes.push_back("conflicting precolored neighbors");
        return res;
    }

    auto adj = pre.graph.adjacency();
    std::vector<int> kept;
    std::vector<std::vector<int>> lists;
    for (int v : s) {
        if (pre.precolor.count(v)) continue;
        std::set<int> blocked;
        for (int u : adj[size_t(v)]) {
            auto it = pre.precolor.find(u);
            if (it != pre.precolor.end()) blocked.insert(it->second);
        }
        std::vector<int> list;
        for (int c : pre.colors)
            if (!blocked.count(c)) list.push_back(c);
        if (int(list.size()) >= k) continue;
        kept.push_back(v);
        lists.push_back(std::move(list));
    }
    if (kept.empty()) {
        res.decided = true;
        res.satisfiable = true;
        res.report.notes.push_back("kernel empty; remaining vertices always colorable");
        return res;
    }

    std::vector<int> newid(size_t(pre.graph.n), -1);
    for (size_t i = 0; i < kept.size(); ++i) newid[size_t(kept[i])] = int(i);
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : pre.graph.edges)
        if (newid[size_t(u)] >= 0 && newid[size_t(v)] >= 0)
            edges.emplace_back(newid[size_t(u)], newid[size_t(v)]);
    res.kernel.graph = Graph(int(kept.size()), std::move(edges));
    res.kernel.colors = pre.colors;
    res.kernel.lists = std::move(lists);
    res.kernel.validate();
    res.kernel_vertices = kept;
    res.report.notes.push_back("kernel vertices: " + std::to_string(kept.size()));
    return res;
}

StripResult precolext_modtd_strip(const PrecoloringInstance& pre,
                                  const std::vector<int>& modulator,
                                  const std::vector<int>& forest) {
    pre.validate();
    auto s = checked_vertex_set(pre.graph.n, modulator, "modulator vertex");
    check_partial_forest(pre.graph, s, forest);
    int k = int(s.size());
    int m = int(pre.colors.size());
    int d = 0;
    for (int v = 0; v < pre.graph.n; ++v)
        if (!in_set(s, v)) d = std::max(d, int(chain_up(forest, v).size()));

    StripResult res;
    res.report.rule = "precolext_modtd_strip";
    res.report.parameter = "modulator size";
    res.report.parameter_value = k;
    res.report.notes.push_back("forest depth: " + std::to_string(d));
    if (m <= d + k) {
        res.decided = true;
        res.satisfiable = solve_precolor_exact(pre);
        res.report.notes.push_back("solved directly: colors fit depth plus modulator");
        return res;
    }
    if (precolored_conflict(pre)) {
        res.decided = true;
        res.satisfiable = false;
        res.report.notes.push_back("conflicting precolored neighbors");
        return res;
    }

    // peel uncolored vertices with fewer live neighbors than colors; they can
    // be colored last in reverse peel order
    auto adj = pre.graph.adjacency();
    std::vector<char> alive(size_t(pre.graph.n), 1);
    int peeled = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < pre.graph.n; ++v) {
            if (!alive[size_t(v)] || pre.precolor.count(v)) continue;
            int deg = 0;
            for (int u : adj[size_t(v)]) deg += alive[size_t(u)];
            if (deg < m) {
                alive[size_t(v)] = 0;
                ++peeled;
                changed = true;
            }
        }
    }
    res.report.notes.push_back("peeled vertices: " + std::to_string(peeled));

    std::vector<int> kept;
    for (int v = 0; v < pre.graph.n; ++v)
        if (alive[size_t(v)] && !pre.precolor.count(v)) kept.push_back(v);
    if (kept.empty()) {
        res.decided = true;
        res.satisfiable = true;
        res.report.notes.push_back("everything peeled or precolored");
        return res;
    }

    std::vector<int> newid(size_t(pre.graph.n), -1);
    for (size_t i = 0; i < kept.size(); ++i) newid[size_t(kept[i])] = int(i);
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : pre.graph.edges)
        if (newid[size_t(u)] >= 0 && newid[size_t(v)] >= 0)
            edges.emplace_back(newid[size_t(u)], newid[size_t(v)]);
    res.instance.graph = Graph(int(kept.size()), std::move(edges));
    res.instance.colors = pre.colors;
    for (int v : kept) {
        std::set<int> blocked;
        for (int u : adj[size_t(v)]) {
            auto it = pre.precolor.find(u);
            if (it != pre.precolor.end()) blocked.insert(it->second);
        }
        std::vector<int> list;
        for (int c : pre.colors)
            if (!blocked.count(c)) list.push_back(c);
        res.instance.lists.push_back(std::move(list));
    }
    res.instance.validate();
    res.kept = kept;
    for (int v : kept)
        if (in_set(s, v)) res.modulator.push_back(newid[size_t(v)]);
    res.forest.assign(kept.size(), -1);
    int depth_out = 0;
    for (int v : kept) {
        if (in_set(s, v)) {
            res.forest[size_t(newid[size_t(v)])] = -2;
            continue;
        }
        int len = 1;
        for (int cur = forest[size_t(v)]; cur >= 0; cur = forest[size_t(cur)]) {
            if (newid[size_t(cur)] >= 0) {
                if (res.forest[size_t(newid[size_t(v)])] == -1)
                    res.forest[size_t(newid[size_t(v)])] = newid[size_t(cur)];
                ++len;
            }
        }
        depth_out = std::max(depth_out, len);
    }
    res.report.notes.push_back("output forest depth: " + std::to_string(depth_out));
    return res;
}

} // namespace csplab
