#include "csplab/solvers.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace csplab {

namespace {

// Oriented view of one constraint, so hot loops skip the map lookups.
struct EdgeView {
    int other = -1;
    const std::vector<std::pair<int, int>>* pairs = nullptr;
    bool flipped = false;

    bool ok(int value_other, int value_self) const {
        auto want = flipped ? std::make_pair(value_self, value_other)
                            : std::make_pair(value_other, value_self);
        return std::binary_search(pairs->begin(), pairs->end(), want);
    }
};

// Fixes variables one at a time to the smallest value keeping `sat` true; the
// DP order of a decision procedure alone does not follow variable-id order,
// so the witness is recovered by restriction instead.
template <class SatFn>
std::optional<std::vector<int>> lex_least_witness(const BinCspInstance& inst, const SatFn& sat) {
    if (!sat(inst)) return std::nullopt;
    BinCspInstance work = inst;
    std::vector<int> out(static_cast<size_t>(inst.n));
    for (int u = 0; u < inst.n; ++u) {
        bool fixed = false;
        for (int a : inst.domains[size_t(u)]) {
            work.domains[size_t(u)] = {a};
            if (sat(work)) {
                out[size_t(u)] = a;
                fixed = true;
                break;
            }
        }
        if (!fixed) throw std::logic_error("restriction lost satisfiability");
    }
    return out;
}

std::vector<int> normalized_vertex_set(const BinCspInstance& inst, std::vector<int> w) {
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    for (int v : w)
        if (v < 0 || v >= inst.n) throw InputError("vertex out of range: " + std::to_string(v));
    return w;
}

// Enumerates assignments of `vars` in lex order; calls f for each and stops
// early once f returns true. Returns whether any call succeeded.
template <class F>
bool any_assignment(const BinCspInstance& inst, const std::vector<int>& vars, std::vector<int>& val,
                    const F& f) {
    for (int v : vars)
        if (inst.domains[size_t(v)].empty()) return false;
    std::vector<size_t> idx(vars.size(), 0);
    while (true) {
        for (size_t i = 0; i < vars.size(); ++i)
            val[size_t(vars[i])] = inst.domains[size_t(vars[i])][idx[i]];
        if (f()) return true;
        size_t i = vars.size();
        while (i > 0) {
            --i;
            if (++idx[i] < inst.domains[size_t(vars[i])].size()) break;
            idx[i] = 0;
            if (i == 0) return false;
        }
        if (vars.empty()) return false;
    }
}

} // namespace

std::optional<std::vector<int>> solve_bruteforce(const BinCspInstance& inst, long cap) {
    inst.validate();
    __int128 total = 1;
    for (auto& d : inst.domains) {
        total *= __int128(d.size());
        if (total > cap)
            throw ResourceError("assignment space exceeds " + std::to_string(cap));
        if (total == 0) return std::nullopt;
    }

    std::vector<std::vector<EdgeView>> views(size_t(inst.n));
    for (auto& [key, pairs] : inst.constraints)
        views[size_t(key.second)].push_back({key.first, &pairs, false});

    std::vector<int> all(size_t(inst.n));
    for (int v = 0; v < inst.n; ++v) all[size_t(v)] = v;
    std::vector<int> val(size_t(inst.n), -1);
    auto consistent = [&]() {
        for (int v = 0; v < inst.n; ++v)
            for (const EdgeView& e : views[size_t(v)])
                if (!e.ok(val[size_t(e.other)], val[size_t(v)])) return false;
        return true;
    };
    if (any_assignment(inst, all, val, consistent)) return val;
    return std::nullopt;
}

namespace {

// Decision procedure for one instance over a fixed elimination forest.
struct ForestDp {
    const BinCspInstance& inst;
    std::vector<std::vector<int>> kids;
    std::vector<std::vector<EdgeView>> up;        // constraints to strict ancestors
    std::vector<std::vector<int>> relevant;       // ancestors constrained into the subtree
    std::vector<std::map<std::vector<int>, bool>> memo;
    std::vector<int> val;
    std::vector<int> roots;

    ForestDp(const BinCspInstance& inst_, const EliminationForest& f) : inst(inst_) {
        int n = inst.n;
        kids.resize(size_t(n));
        up.resize(size_t(n));
        relevant.resize(size_t(n));
        memo.resize(size_t(n));
        val.assign(size_t(n), -1);
        for (int v = 0; v < n; ++v) {
            if (f.parent[size_t(v)] == -2) continue;
            if (f.parent[size_t(v)] == -1)
                roots.push_back(v);
            else
                kids[size_t(f.parent[size_t(v)])].push_back(v);
        }
        for (auto& [key, pairs] : inst.constraints) {
            auto [u, v] = key;
            auto au = f.ancestors(u);
            if (std::find(au.begin(), au.end(), v) != au.end()) {
                up[size_t(u)].push_back({v, &pairs, true});  // pairs oriented (u,v), self is u
                continue;
            }
            auto av = f.ancestors(v);
            if (std::find(av.begin(), av.end(), u) == av.end())
                throw InputError("edge " + std::to_string(u) + "-" + std::to_string(v) +
                                 " joins unrelated forest vertices");
            up[size_t(v)].push_back({u, &pairs, false});
        }
        // relevant(v) = union over the subtree of ancestor endpoints, minus v
        for (int r : roots) collect(r);
    }

    std::vector<int>& collect(int v) {
        auto& rel = relevant[size_t(v)];
        for (const EdgeView& e : up[size_t(v)]) rel.push_back(e.other);
        for (int c : kids[size_t(v)]) {
            for (int u : collect(c))
                if (u != v) rel.push_back(u);
        }
        std::sort(rel.begin(), rel.end());
        rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
        return rel;
    }

    bool exists(int v) {
        std::vector<int> key;
        key.reserve(relevant[size_t(v)].size());
        for (int u : relevant[size_t(v)]) key.push_back(val[size_t(u)]);
        auto it = memo[size_t(v)].find(key);
        if (it != memo[size_t(v)].end()) return it->second;
        bool any = false;
        for (int a : inst.domains[size_t(v)]) {
            bool ok = true;
            for (const EdgeView& e : up[size_t(v)])
                if (!e.ok(val[size_t(e.other)], a)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            val[size_t(v)] = a;
            bool all = true;
            for (int c : kids[size_t(v)])
                if (!exists(c)) {
                    all = false;
                    break;
                }
            if (all) {
                any = true;
                break;
            }
        }
        val[size_t(v)] = -1;
        memo[size_t(v)][std::move(key)] = any;
        return any;
    }

    bool run() {
        for (int r : roots)
            if (!exists(r)) return false;
        return true;
    }
};

} // namespace

std::optional<std::vector<int>> solve_by_elimination_forest(const BinCspInstance& inst,
                                                            const EliminationForest& f) {
    inst.validate();
    std::string why;
    if (!validate_elimination_forest(inst.gaifman(), f, &why))
        throw InputError("invalid elimination forest: " + why);
    return lex_least_witness(inst,
                             [&](const BinCspInstance& cur) { return ForestDp(cur, f).run(); });
}

std::optional<std::vector<int>> solve_by_vertex_cover(const BinCspInstance& inst,
                                                      const std::vector<int>& cover) {
    inst.validate();
    std::vector<int> w = normalized_vertex_set(inst, cover);
    std::vector<char> in_w(size_t(inst.n), 0);
    for (int v : w) in_w[size_t(v)] = 1;
    for (auto& [key, _] : inst.constraints)
        if (!in_w[size_t(key.first)] && !in_w[size_t(key.second)])
            throw InputError("set misses edge " + std::to_string(key.first) + "-" +
                             std::to_string(key.second) + ", not a vertex cover");

    std::vector<int> rest;
    for (int v = 0; v < inst.n; ++v)
        if (!in_w[size_t(v)]) rest.push_back(v);

    auto decide = [&](const BinCspInstance& cur) {
        // constraints inside W, and from each outside vertex into W
        std::vector<std::vector<EdgeView>> inner(size_t(cur.n)), outer(size_t(cur.n));
        for (auto& [key, pairs] : cur.constraints) {
            auto [u, v] = key;
            if (in_w[size_t(u)] && in_w[size_t(v)])
                inner[size_t(v)].push_back({u, &pairs, false});
            else if (in_w[size_t(u)])
                outer[size_t(v)].push_back({u, &pairs, false});
            else
                outer[size_t(u)].push_back({v, &pairs, true});
        }
        std::vector<int> val(size_t(cur.n), -1);
        return any_assignment(cur, w, val, [&]() {
            for (int v : w)
                for (const EdgeView& e : inner[size_t(v)])
                    if (!e.ok(val[size_t(e.other)], val[size_t(v)])) return false;
            for (int v : rest) {
                bool found = false;
                for (int a : cur.domains[size_t(v)]) {
                    bool ok = true;
                    for (const EdgeView& e : outer[size_t(v)])
                        if (!e.ok(val[size_t(e.other)], a)) {
                            ok = false;
                            break;
                        }
                    if (ok) {
                        found = true;
                        break;
                    }
                }
                if (!found) return false;
            }
            return true;
        });
    };
    return lex_least_witness(inst, decide);
}

std::optional<std::vector<int>> solve_by_modulator(const BinCspInstance& inst,
                                                   const std::vector<int>& w,
                                                   const EliminationForest& forest) {
    inst.validate();
    std::vector<int> mod = normalized_vertex_set(inst, w);
    if (forest.size() != inst.n) throw InputError("forest size differs from variable count");
    std::vector<char> in_w(size_t(inst.n), 0);
    for (int v : mod) in_w[size_t(v)] = 1;
    for (int v = 0; v < inst.n; ++v) {
        bool absent = forest.parent[size_t(v)] == -2;
        if (absent != bool(in_w[size_t(v)]))
            throw InputError("forest must cover exactly the vertices outside the modulator");
        if (!absent) forest.ancestors(v);  // throws on broken chains
    }
    for (auto& [key, _] : inst.constraints) {
        auto [u, v] = key;
        if (in_w[size_t(u)] || in_w[size_t(v)]) continue;
        auto au = forest.ancestors(u);
        auto av = forest.ancestors(v);
        if (std::find(au.begin(), au.end(), v) == au.end() &&
            std::find(av.begin(), av.end(), u) == av.end())
            throw InputError("edge " + std::to_string(u) + "-" + std::to_string(v) +
                             " joins unrelated forest vertices");
    }

    // forest for the DP: modulator vertices ride along as isolated roots
    EliminationForest dp_forest = forest;
    for (int v : mod) dp_forest.parent[size_t(v)] = -1;

    auto decide = [&](const BinCspInstance& cur) {
        std::vector<std::vector<EdgeView>> inner(size_t(cur.n)), from_w(size_t(cur.n));
        BinCspInstance rest;
        rest.n = cur.n;
        rest.domains.resize(size_t(cur.n));
        for (auto& [key, pairs] : cur.constraints) {
            auto [u, v] = key;
            if (in_w[size_t(u)] && in_w[size_t(v)])
                inner[size_t(v)].push_back({u, &pairs, false});
            else if (in_w[size_t(u)])
                from_w[size_t(v)].push_back({u, &pairs, false});
            else if (in_w[size_t(v)])
                from_w[size_t(u)].push_back({v, &pairs, true});
            else
                rest.constraints.emplace(key, pairs);
        }
        std::vector<int> val(size_t(cur.n), -1);
        return any_assignment(cur, mod, val, [&]() {
            for (int v : mod)
                for (const EdgeView& e : inner[size_t(v)])
                    if (!e.ok(val[size_t(e.other)], val[size_t(v)])) return false;
            for (int v = 0; v < cur.n; ++v) {
                if (in_w[size_t(v)]) {
                    rest.domains[size_t(v)] = {val[size_t(v)]};
                    continue;
                }
                rest.domains[size_t(v)].clear();
                for (int a : cur.domains[size_t(v)]) {
                    bool ok = true;
                    for (const EdgeView& e : from_w[size_t(v)])
                        if (!e.ok(val[size_t(e.other)], a)) {
                            ok = false;
                            break;
                        }
                    if (ok) rest.domains[size_t(v)].push_back(a);
                }
            }
            return ForestDp(rest, dp_forest).run();
        });
    };
    return lex_least_witness(inst, decide);
}

} // namespace csplab
