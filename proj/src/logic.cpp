#include "csplab/logic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <sstream>
#include <utility>

#include "csplab/errors.hpp"
#include "csplab/textio.hpp"

namespace csplab {

namespace {

void check_shape(const FoTerm& t) {
    switch (t.kind) {
        case FoTerm::Kind::constant:
            if (!t.args.empty() || !t.kids.empty()) throw InputError("constant term takes no arguments");
            return;
        case FoTerm::Kind::relation:
            if (t.rel.empty()) throw InputError("relation atom needs a name");
            if (t.args.empty() || t.args.size() > 2)
                throw InputError("relation " + t.rel + " takes 1 or 2 arguments");
            if (!t.kids.empty()) throw InputError("relation atom takes no subterms");
            break;
        case FoTerm::Kind::equals:
            if (t.args.size() != 2) throw InputError("equality takes exactly 2 arguments");
            if (!t.kids.empty()) throw InputError("equality takes no subterms");
            break;
        case FoTerm::Kind::neg:
            if (t.kids.size() != 1) throw InputError("negation takes exactly one subterm");
            if (!t.args.empty()) throw InputError("negation takes no arguments");
            break;
        case FoTerm::Kind::conj:
        case FoTerm::Kind::disj:
            if (!t.args.empty()) throw InputError("connective takes no arguments");
            break;
    }
    for (int v : t.args)
        if (v < 0) throw InputError("negative variable id in a formula");
    for (const FoTerm& kid : t.kids) check_shape(kid);
}

void walk_vars(const FoTerm& t, const std::function<void(int)>& f) {
    for (int v : t.args) f(v);
    for (const FoTerm& kid : t.kids) walk_vars(kid, f);
}

// Relations mentioned by the matrix must be declared with matching arity.
void require_signature(const RelationalStructure& a, const FoTerm& t) {
    if (t.kind == FoTerm::Kind::relation) {
        auto it = a.arity.find(t.rel);
        if (it == a.arity.end()) throw InputError("relation " + t.rel + " missing from the structure");
        if (it->second != int(t.args.size()))
            throw InputError("relation " + t.rel + " used with arity " + std::to_string(t.args.size()));
    }
    for (const FoTerm& kid : t.kids) require_signature(a, kid);
}

// Three-valued evaluation under a partial assignment: nullopt means the value
// still depends on unassigned variables. Sound for pruning because extending
// an assignment never flips a determined subterm.
std::optional<bool> eval_partial(const RelationalStructure& a, const FoTerm& t,
                                 const std::vector<int>& val, const std::vector<char>& assigned) {
    switch (t.kind) {
        case FoTerm::Kind::constant:
            return t.value;
        case FoTerm::Kind::relation: {
            std::vector<int> tup;
            tup.reserve(t.args.size());
            for (int v : t.args) {
                if (!assigned[size_t(v)]) return std::nullopt;
                tup.push_back(val[size_t(v)]);
            }
            return a.holds(t.rel, tup);
        }
        case FoTerm::Kind::equals: {
            int x = t.args[0], y = t.args[1];
            if (!assigned[size_t(x)] || !assigned[size_t(y)]) return std::nullopt;
            return val[size_t(x)] == val[size_t(y)];
        }
        case FoTerm::Kind::neg: {
            auto r = eval_partial(a, t.kids[0], val, assigned);
            if (!r) return std::nullopt;
            return !*r;
        }
        case FoTerm::Kind::conj: {
            bool open = false;
            for (const FoTerm& kid : t.kids) {
                auto r = eval_partial(a, kid, val, assigned);
                if (r && !*r) return false;
                if (!r) open = true;
            }
            if (open) return std::nullopt;
            return true;
        }
        case FoTerm::Kind::disj: {
            bool open = false;
            for (const FoTerm& kid : t.kids) {
                auto r = eval_partial(a, kid, val, assigned);
                if (r && *r) return true;
                if (!r) open = true;
            }
            if (open) return std::nullopt;
            return false;
        }
    }
    throw InputError("malformed formula term");
}

}  // namespace

void RelationalStructure::add_relation(const std::string& name, int ar) {
    if (name.empty()) throw InputError("relation name must be nonempty");
    if (ar != 1 && ar != 2) throw InputError("relation " + name + " must have arity 1 or 2");
    if (arity.count(name)) throw InputError("relation " + name + " declared twice");
    arity[name] = ar;
    tuples[name];
}

void RelationalStructure::add_tuple(const std::string& name, std::vector<int> tup) {
    auto it = arity.find(name);
    if (it == arity.end()) throw InputError("relation " + name + " not declared");
    if (int(tup.size()) != it->second)
        throw InputError("relation " + name + " takes " + std::to_string(it->second) + " elements");
    for (int e : tup)
        if (e < 0 || e >= universe)
            throw InputError("element " + std::to_string(e) + " outside the universe");
    tuples[name].insert(std::move(tup));
}

bool RelationalStructure::has_relation(const std::string& name) const {
    return arity.count(name) > 0;
}

bool RelationalStructure::holds(const std::string& name, const std::vector<int>& tup) const {
    auto it = tuples.find(name);
    if (it == tuples.end()) throw InputError("relation " + name + " not declared");
    return it->second.count(tup) > 0;
}

void RelationalStructure::validate() const {
    if (universe < 0) throw InputError("universe size must be nonnegative");
    if (arity.size() != tuples.size()) throw InputError("relation tables out of sync");
    for (const auto& [name, ar] : arity) {
        if (name.empty()) throw InputError("relation name must be nonempty");
        if (ar != 1 && ar != 2) throw InputError("relation " + name + " must have arity 1 or 2");
        auto it = tuples.find(name);
        if (it == tuples.end()) throw InputError("relation " + name + " has no tuple set");
        for (const auto& tup : it->second) {
            if (int(tup.size()) != ar) throw InputError("relation " + name + " holds a malformed tuple");
            for (int e : tup)
                if (e < 0 || e >= universe)
                    throw InputError("relation " + name + " mentions element " + std::to_string(e) +
                                     " outside the universe");
        }
    }
}

FoTerm FoTerm::truth(bool v) {
    FoTerm t;
    t.kind = Kind::constant;
    t.value = v;
    return t;
}

FoTerm FoTerm::atom(std::string rel, std::vector<int> args) {
    FoTerm t;
    t.kind = Kind::relation;
    t.rel = std::move(rel);
    t.args = std::move(args);
    return t;
}

FoTerm FoTerm::equal(int a, int b) {
    FoTerm t;
    t.kind = Kind::equals;
    t.args = {a, b};
    return t;
}

FoTerm FoTerm::conj_of(std::vector<FoTerm> kids) {
    FoTerm t;
    t.kind = Kind::conj;
    t.kids = std::move(kids);
    return t;
}

FoTerm FoTerm::disj_of(std::vector<FoTerm> kids) {
    FoTerm t;
    t.kind = Kind::disj;
    t.kids = std::move(kids);
    return t;
}

FoTerm FoTerm::neg_of(FoTerm kid) {
    FoTerm t;
    t.kind = Kind::neg;
    t.kids.push_back(std::move(kid));
    return t;
}

void GuidedSentence::validate() const {
    if (k < 1) throw InputError("guided sentence needs depth at least 1");
    check_shape(matrix);
    walk_vars(matrix, [&](int v) {
        if (v >= 2 * k) throw InputError("guided matrix uses variable beyond depth " + std::to_string(k));
    });
}

void PrenexSentence::validate() const {
    std::set<int> seen;
    for (size_t i = 0; i < blocks.size(); ++i) {
        const QuantifierBlock& b = blocks[i];
        if (b.vars.empty()) throw InputError("empty quantifier block");
        if (i > 0 && blocks[i - 1].existential == b.existential)
            throw InputError("adjacent quantifier blocks must alternate");
        for (int v : b.vars) {
            if (v < 0) throw InputError("negative variable id in a quantifier block");
            if (!seen.insert(v).second)
                throw InputError("variable " + std::to_string(v) + " quantified twice");
        }
    }
    check_shape(matrix);
    walk_vars(matrix, [&](int v) {
        if (!seen.count(v))
            throw InputError("matrix uses unquantified variable " + std::to_string(v));
    });
}

bool is_sigma_shape(const PrenexSentence& s, int t) {
    if (int(s.blocks.size()) > t) return false;
    return s.blocks.empty() || s.blocks[0].existential;
}

bool eval_guided(const RelationalStructure& a, const GuidedSentence& s, GuidedStats* stats) {
    a.validate();
    s.validate();
    require_signature(a, s.matrix);
    for (const char* name : {"root", "parent"})
        if (!a.has_relation(name))
            throw InputError(std::string("relation ") + name + " missing from the structure");
    if (a.arity.at("root") != 1 || a.arity.at("parent") != 2)
        throw InputError("guided guard needs root of arity 1 and parent of arity 2");

    std::vector<std::vector<int>> kids(size_t(a.universe));
    for (const auto& tup : a.tuples.at("parent")) kids[size_t(tup[0])].push_back(tup[1]);
    std::vector<int> roots;
    for (const auto& tup : a.tuples.at("root")) roots.push_back(tup[0]);

    const int k = s.k;
    // reach[r][e]: e starts a parent chain with r more steps. Chains that
    // cannot complete never satisfy the guard, so they are vacuously true and
    // the evaluation may skip them outright.
    std::vector<std::vector<char>> reach(size_t(k), std::vector<char>(size_t(a.universe), 1));
    for (int r = 1; r < k; ++r)
        for (int e = 0; e < a.universe; ++e) {
            char ok = 0;
            for (int c : kids[size_t(e)]) ok |= reach[size_t(r - 1)][size_t(c)];
            reach[size_t(r)][size_t(e)] = ok;
        }

    std::vector<int> val(size_t(2 * k), 0);
    std::vector<char> assigned(size_t(2 * k), 0);
    std::set<std::vector<int>> chains;
    long evals = 0;

    // Every examined chain prefix completes, so a matrix that is already
    // false under the partial assignment sinks the branch, and one that is
    // already true settles it (the remaining quantifiers range over a
    // nonempty universe).
    std::function<bool(int)> forall_x;
    std::function<bool(int)> exists_y = [&](int level) -> bool {
        if (level == k - 1) {
            std::vector<int> chain(static_cast<size_t>(k));
            for (int i = 0; i < k; ++i) chain[size_t(i)] = val[size_t(2 * i)];
            chains.insert(std::move(chain));
        }
        bool found = false;
        for (int e = 0; e < a.universe && !found; ++e) {
            val[size_t(2 * level + 1)] = e;
            assigned[size_t(2 * level + 1)] = 1;
            ++evals;
            auto part = eval_partial(a, s.matrix, val, assigned);
            if (part)
                found = *part;
            else
                found = forall_x(level + 1);
        }
        assigned[size_t(2 * level + 1)] = 0;
        return found;
    };
    forall_x = [&](int level) -> bool {
        const std::vector<int>& cand = level == 0 ? roots : kids[size_t(val[size_t(2 * (level - 1))])];
        bool ok = true;
        for (size_t i = 0; i < cand.size() && ok; ++i) {
            if (!reach[size_t(k - 1 - level)][size_t(cand[i])]) continue;
            val[size_t(2 * level)] = cand[i];
            assigned[size_t(2 * level)] = 1;
            ok = exists_y(level);
        }
        assigned[size_t(2 * level)] = 0;
        return ok;
    };

    bool out = forall_x(0);
    if (stats) {
        stats->chains_examined = long(chains.size());
        stats->matrix_evals = evals;
    }
    return out;
}

bool eval_prenex(const RelationalStructure& a, const PrenexSentence& s) {
    a.validate();
    s.validate();
    require_signature(a, s.matrix);

    std::vector<std::pair<int, bool>> order;
    int maxid = -1;
    for (const QuantifierBlock& b : s.blocks)
        for (int v : b.vars) {
            order.emplace_back(v, b.existential);
            maxid = std::max(maxid, v);
        }
    std::vector<int> val(size_t(maxid + 1), 0);
    std::vector<char> assigned(size_t(maxid + 1), 0);

    std::function<bool(size_t)> rec = [&](size_t i) -> bool {
        // over an empty universe the outermost remaining quantifier decides
        if (i < order.size() && a.universe == 0) return !order[i].second;
        auto part = eval_partial(a, s.matrix, val, assigned);
        if (part) return *part;
        // validate() keeps matrix variables quantified, so a full assignment
        // is always determined and i < order.size() here.
        auto [v, ex] = order[i];
        bool decided = false;
        bool result = !ex;
        for (int e = 0; e < a.universe && !decided; ++e) {
            val[size_t(v)] = e;
            assigned[size_t(v)] = 1;
            bool r = rec(i + 1);
            if (r == ex) {
                result = r;
                decided = true;
            }
        }
        assigned[size_t(v)] = 0;
        return result;
    };
    return rec(0);
}

GuidedEncoding bincsp_td_to_structure(const BinCspInstance& inst, const EliminationForest& f) {
    inst.validate();
    if (f.size() != inst.n) throw InputError("forest size does not match the instance");
    std::string why;
    if (!validate_elimination_forest(inst.gaifman(), f, &why))
        throw InputError("elimination forest rejected: " + why);

    // Pad every shallow leaf with fresh singleton-domain vertices so each
    // maximal chain has length exactly k; the guard only fires on full
    // chains, so unpadded short branches would never be checked.
    const int k = std::max(1, f.depth());
    std::vector<int> parent = f.parent;
    std::vector<std::vector<int>> dom = inst.domains;
    std::vector<char> leaf(size_t(inst.n), 1);
    for (int v = 0; v < inst.n; ++v)
        if (f.parent[size_t(v)] >= 0) leaf[size_t(f.parent[size_t(v)])] = 0;
    for (int v = 0; v < inst.n; ++v) {
        if (!leaf[size_t(v)]) continue;
        int cur = v;
        for (int dd = f.depth_of(v); dd < k; ++dd) {
            parent.push_back(cur);
            dom.push_back({0});
            cur = int(parent.size()) - 1;
        }
    }
    const int m = int(parent.size());

    GuidedEncoding out;
    out.padded_vertices = m;
    out.vertex_element.resize(size_t(m));
    out.value_element.resize(size_t(m));
    int next = 0;
    for (int v = 0; v < m; ++v) out.vertex_element[size_t(v)] = next++;
    for (int v = 0; v < m; ++v)
        for (int a : dom[size_t(v)]) out.value_element[size_t(v)][a] = next++;

    RelationalStructure& a = out.structure;
    a.universe = next;
    a.add_relation("forest", 1);
    a.add_relation("parent", 2);
    a.add_relation("root", 1);
    a.add_relation("domain", 2);
    a.add_relation("forbidden", 2);
    for (int v = 0; v < m; ++v) {
        a.add_tuple("forest", {out.vertex_element[size_t(v)]});
        if (parent[size_t(v)] >= 0)
            a.add_tuple("parent", {out.vertex_element[size_t(parent[size_t(v)])], out.vertex_element[size_t(v)]});
        else
            a.add_tuple("root", {out.vertex_element[size_t(v)]});
        for (const auto& [value, elem] : out.value_element[size_t(v)]) {
            (void)value;
            a.add_tuple("root", {elem});
            a.add_tuple("domain", {out.vertex_element[size_t(v)], elem});
        }
    }
    // Chain order follows depth, not vertex ids, so store both orientations.
    for (auto [u, v] : inst.edge_list())
        for (int av : inst.domains[size_t(u)])
            for (int bv : inst.domains[size_t(v)]) {
                if (inst.pair_allowed(u, v, av, bv)) continue;
                int ea = out.value_element[size_t(u)].at(av);
                int eb = out.value_element[size_t(v)].at(bv);
                a.add_tuple("forbidden", {ea, eb});
                a.add_tuple("forbidden", {eb, ea});
            }

    // Value elements are roots too; chains starting there carry no vertex, so
    // the matrix lets them pass through the leading disjunct.
    GuidedSentence& s = out.sentence;
    s.k = k;
    std::vector<FoTerm> need;
    need.push_back(FoTerm::atom("forest", {0}));
    for (int i = 0; i < k; ++i) need.push_back(FoTerm::atom("domain", {2 * i, 2 * i + 1}));
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            need.push_back(FoTerm::neg_of(FoTerm::atom("forbidden", {2 * i + 1, 2 * j + 1})));
    s.matrix = FoTerm::disj_of(
        {FoTerm::neg_of(FoTerm::atom("forest", {0})), FoTerm::conj_of(std::move(need))});

    s.validate();
    a.validate();
    return out;
}

PrenexEncoding bincsp_dfold_to_prenex(const BinCspInstance& inst, const FatEliminationTree& w) {
    inst.validate();
    if (w.size() == 0) throw InputError("fat elimination tree needs a root node");
    if (w.parent[0] != -1) throw InputError("fat elimination tree rejected: node 0 must be the root");
    for (int t = 1; t < w.size(); ++t)
        if (w.parent[size_t(t)] < 0 || w.parent[size_t(t)] >= t)
            throw InputError("fat elimination tree rejected: parents must precede children");
    const int d = w.depth();
    const int k = w.width();
    std::string why;
    if (!validate_fat_elimination_tree(inst.gaifman(), w, d, k, &why))
        throw InputError("fat elimination tree rejected: " + why);

    // Pad bags to size exactly k and leaves to depth exactly d with fresh
    // unconstrained singleton-domain vertices; the sentence needs k distinct
    // bag members per level on every root chain.
    std::vector<int> parent = w.parent;
    std::vector<std::vector<int>> bags = w.bags;
    std::vector<std::vector<int>> dom = inst.domains;
    auto fresh_vertex = [&]() {
        dom.push_back({0});
        return int(dom.size()) - 1;
    };
    for (auto& bag : bags)
        while (int(bag.size()) < k) bag.push_back(fresh_vertex());
    const int nt = int(parent.size());
    std::vector<int> ndepth(size_t(nt), 0);
    for (int t = 0; t < nt; ++t)  // parents precede children
        ndepth[size_t(t)] = parent[size_t(t)] < 0 ? 1 : ndepth[size_t(parent[size_t(t)])] + 1;
    std::vector<char> leaf(size_t(nt), 1);
    for (int t = 0; t < nt; ++t)
        if (parent[size_t(t)] >= 0) leaf[size_t(parent[size_t(t)])] = 0;
    for (int t = 0; t < nt; ++t) {
        if (!leaf[size_t(t)]) continue;
        int cur = t;
        for (int dd = ndepth[size_t(t)]; dd < d; ++dd) {
            parent.push_back(cur);
            std::vector<int> bag;
            for (int i = 0; i < k; ++i) bag.push_back(fresh_vertex());
            bags.push_back(std::move(bag));
            cur = int(parent.size()) - 1;
        }
    }
    const int m = int(parent.size());
    const int nv = int(dom.size());

    PrenexEncoding out;
    out.tree_nodes = m;
    out.vertices = nv;
    out.node_element.resize(size_t(m));
    out.vertex_element.resize(size_t(nv));
    out.value_element.resize(size_t(nv));
    int next = 0;
    for (int t = 0; t < m; ++t) out.node_element[size_t(t)] = next++;
    for (int v = 0; v < nv; ++v) out.vertex_element[size_t(v)] = next++;
    for (int v = 0; v < nv; ++v)
        for (int a : dom[size_t(v)]) out.value_element[size_t(v)][a] = next++;

    RelationalStructure& a = out.structure;
    a.universe = next;
    a.add_relation("root", 1);
    a.add_relation("parent", 2);
    a.add_relation("bag", 2);
    a.add_relation("domain", 2);
    a.add_relation("forbidden", 2);
    a.add_tuple("root", {out.node_element[0]});
    for (int t = 1; t < m; ++t)
        a.add_tuple("parent", {out.node_element[size_t(parent[size_t(t)])], out.node_element[size_t(t)]});
    for (int t = 0; t < m; ++t)
        for (int u : bags[size_t(t)])
            a.add_tuple("bag", {out.node_element[size_t(t)], out.vertex_element[size_t(u)]});
    for (int v = 0; v < nv; ++v)
        for (const auto& [value, elem] : out.value_element[size_t(v)]) {
            (void)value;
            a.add_tuple("domain", {out.vertex_element[size_t(v)], elem});
        }
    for (auto [u, v] : inst.edge_list())
        for (int av : inst.domains[size_t(u)])
            for (int bv : inst.domains[size_t(v)]) {
                if (inst.pair_allowed(u, v, av, bv)) continue;
                int ea = out.value_element[size_t(u)].at(av);
                int eb = out.value_element[size_t(v)].at(bv);
                a.add_tuple("forbidden", {ea, eb});
                a.add_tuple("forbidden", {eb, ea});
            }

    // Level 1 is existential (x_1 is pinned to the root); each later level
    // adds one universal tree variable and 2k existential pair variables.
    PrenexSentence& s = out.sentence;
    int nextvar = 0;
    std::vector<int> x(size_t(d + 1), -1);
    std::vector<std::vector<int>> y(size_t(d + 1)), z(size_t(d + 1));
    for (int j = 1; j <= d; ++j) {
        QuantifierBlock uni, exi;
        uni.existential = false;
        x[size_t(j)] = nextvar++;
        (j == 1 ? exi : uni).vars.push_back(x[size_t(j)]);
        for (int i = 0; i < k; ++i) {
            y[size_t(j)].push_back(nextvar++);
            exi.vars.push_back(y[size_t(j)][size_t(i)]);
            z[size_t(j)].push_back(nextvar++);
            exi.vars.push_back(z[size_t(j)][size_t(i)]);
        }
        if (!uni.vars.empty()) s.blocks.push_back(std::move(uni));
        if (!exi.vars.empty()) s.blocks.push_back(std::move(exi));
    }
    std::vector<QuantifierBlock> merged;
    for (QuantifierBlock& b : s.blocks) {
        if (!merged.empty() && merged.back().existential == b.existential)
            merged.back().vars.insert(merged.back().vars.end(), b.vars.begin(), b.vars.end());
        else
            merged.push_back(std::move(b));
    }
    s.blocks = std::move(merged);

    std::vector<FoTerm> psi;
    for (int j = 1; j <= d; ++j)
        for (int i = 0; i < k; ++i) psi.push_back(FoTerm::atom("bag", {x[size_t(j)], y[size_t(j)][size_t(i)]}));
    for (int j = 1; j <= d; ++j)
        for (int i = 0; i < k; ++i)
            for (int i2 = i + 1; i2 < k; ++i2)
                psi.push_back(FoTerm::neg_of(FoTerm::equal(y[size_t(j)][size_t(i)], y[size_t(j)][size_t(i2)])));
    for (int j = 1; j <= d; ++j)
        for (int i = 0; i < k; ++i)
            psi.push_back(FoTerm::atom("domain", {y[size_t(j)][size_t(i)], z[size_t(j)][size_t(i)]}));
    std::vector<int> allz;
    for (int j = 1; j <= d; ++j)
        for (int i = 0; i < k; ++i) allz.push_back(z[size_t(j)][size_t(i)]);
    for (size_t p = 0; p < allz.size(); ++p)
        for (size_t q = p + 1; q < allz.size(); ++q)
            psi.push_back(FoTerm::neg_of(FoTerm::atom("forbidden", {allz[p], allz[q]})));
    FoTerm body = FoTerm::conj_of(std::move(psi));
    if (d >= 2) {
        std::vector<FoTerm> guard;
        for (int j = 2; j <= d; ++j)
            guard.push_back(FoTerm::atom("parent", {x[size_t(j - 1)], x[size_t(j)]}));
        body = FoTerm::disj_of({FoTerm::neg_of(FoTerm::conj_of(std::move(guard))), std::move(body)});
    }
    s.matrix = FoTerm::conj_of({FoTerm::atom("root", {x[1]}), std::move(body)});

    s.validate();
    a.validate();
    return out;
}

RelationalStructure parse_struct(const std::string& text) {
    auto lines = tokenize_text(text);
    if (lines.empty()) throw InputError("empty structure file");
    const Line& head = lines[0];
    if (head.tok(0, "header") != "universe") head.fail("expected 'universe <n>'");
    RelationalStructure a;
    a.universe = head.num(1, "universe size");
    if (a.universe < 0) head.fail("negative universe size");
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        const std::string& kind = l.tokens[0];
        try {
            if (kind == "rel") {
                a.add_relation(l.tok(1, "relation name"), l.num(2, "arity"));
            } else if (kind == "tup") {
                const std::string& name = l.tok(1, "relation name");
                std::vector<int> tup;
                for (size_t j = 2; j < l.tokens.size(); ++j) tup.push_back(l.num(j, "element"));
                a.add_tuple(name, std::move(tup));
            } else {
                l.fail("unknown directive '" + kind + "'");
            }
        } catch (const InputError& e) {
            std::string msg = e.what();
            if (msg.rfind("line ", 0) == 0) throw;
            l.fail(msg);
        }
    }
    a.validate();
    return a;
}

std::string write_struct(const RelationalStructure& a) {
    a.validate();
    std::ostringstream out;
    out << "universe " << a.universe << "\n";
    for (const auto& [name, ar] : a.arity) out << "rel " << name << " " << ar << "\n";
    for (const auto& [name, tups] : a.tuples)
        for (const auto& tup : tups) {
            out << "tup " << name;
            for (int e : tup) out << " " << e;
            out << "\n";
        }
    return out.str();
}

namespace {

struct Sexp {
    bool leaf = true;
    std::string sym;
    std::vector<Sexp> kids;
};

std::vector<std::string> fo_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '(' || c == ')') {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
            out.push_back(std::string(1, c));
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

Sexp parse_sexp(const std::vector<std::string>& toks, size_t& pos) {
    if (pos >= toks.size()) throw InputError("fo: unexpected end of input");
    Sexp e;
    if (toks[pos] == "(") {
        ++pos;
        e.leaf = false;
        while (pos < toks.size() && toks[pos] != ")") e.kids.push_back(parse_sexp(toks, pos));
        if (pos >= toks.size()) throw InputError("fo: missing closing parenthesis");
        ++pos;
        return e;
    }
    if (toks[pos] == ")") throw InputError("fo: unexpected closing parenthesis");
    e.sym = toks[pos++];
    return e;
}

bool reserved_word(const std::string& s) {
    return s == "exists" || s == "forall" || s == "guided" || s == "and" || s == "or" ||
           s == "not" || s == "=" || s == "true" || s == "false";
}

int lookup_var(const std::map<std::string, int>& vars, const Sexp& e) {
    if (!e.leaf) throw InputError("fo: expected a variable name");
    auto it = vars.find(e.sym);
    if (it == vars.end()) throw InputError("fo: unbound variable '" + e.sym + "'");
    return it->second;
}

FoTerm matrix_of(const Sexp& e, const std::map<std::string, int>& vars) {
    if (e.leaf) {
        if (e.sym == "true") return FoTerm::truth(true);
        if (e.sym == "false") return FoTerm::truth(false);
        throw InputError("fo: bare symbol '" + e.sym + "' is not a formula");
    }
    if (e.kids.empty() || !e.kids[0].leaf) throw InputError("fo: formula needs a head symbol");
    const std::string& head = e.kids[0].sym;
    if (head == "and" || head == "or") {
        std::vector<FoTerm> kids;
        for (size_t i = 1; i < e.kids.size(); ++i) kids.push_back(matrix_of(e.kids[i], vars));
        return head == "and" ? FoTerm::conj_of(std::move(kids)) : FoTerm::disj_of(std::move(kids));
    }
    if (head == "not") {
        if (e.kids.size() != 2) throw InputError("fo: not takes exactly one formula");
        return FoTerm::neg_of(matrix_of(e.kids[1], vars));
    }
    if (head == "=") {
        if (e.kids.size() != 3) throw InputError("fo: = takes exactly two variables");
        return FoTerm::equal(lookup_var(vars, e.kids[1]), lookup_var(vars, e.kids[2]));
    }
    if (head == "exists" || head == "forall" || head == "guided")
        throw InputError("fo: quantifier '" + head + "' inside a matrix");
    if (head == "true" || head == "false") throw InputError("fo: constant takes no arguments");
    if (e.kids.size() < 2 || e.kids.size() > 3)
        throw InputError("fo: relation " + head + " takes 1 or 2 variables");
    std::vector<int> args;
    for (size_t i = 1; i < e.kids.size(); ++i) args.push_back(lookup_var(vars, e.kids[i]));
    return FoTerm::atom(head, std::move(args));
}

Sexp parse_single_sexp(const std::string& text) {
    auto toks = fo_tokens(text);
    size_t pos = 0;
    Sexp e = parse_sexp(toks, pos);
    if (pos != toks.size()) throw InputError("fo: trailing input after the sentence");
    return e;
}

}  // namespace

PrenexSentence parse_fo(const std::string& text) {
    Sexp e = parse_single_sexp(text);
    PrenexSentence s;
    std::map<std::string, int> vars;
    const Sexp* cur = &e;
    while (!cur->leaf && !cur->kids.empty() && cur->kids[0].leaf &&
           (cur->kids[0].sym == "exists" || cur->kids[0].sym == "forall")) {
        if (cur->kids.size() != 3)
            throw InputError("fo: expected (" + cur->kids[0].sym + " (<vars>) <body>)");
        if (cur->kids[1].leaf) throw InputError("fo: quantifier needs a variable list");
        QuantifierBlock b;
        b.existential = cur->kids[0].sym == "exists";
        for (const Sexp& v : cur->kids[1].kids) {
            if (!v.leaf) throw InputError("fo: variable names must be symbols");
            if (reserved_word(v.sym)) throw InputError("fo: '" + v.sym + "' is reserved");
            if (vars.count(v.sym)) throw InputError("fo: variable '" + v.sym + "' bound twice");
            int id = int(vars.size());
            vars[v.sym] = id;
            b.vars.push_back(id);
        }
        s.blocks.push_back(std::move(b));
        cur = &cur->kids[2];
    }
    s.matrix = matrix_of(*cur, vars);
    s.validate();
    return s;
}

GuidedSentence parse_guided_fo(const std::string& text) {
    Sexp e = parse_single_sexp(text);
    if (e.leaf || e.kids.size() != 3 || !e.kids[0].leaf || e.kids[0].sym != "guided" ||
        !e.kids[1].leaf)
        throw InputError("fo: expected (guided <k> <matrix>)");
    int k = 0;
    try {
        size_t pos = 0;
        k = std::stoi(e.kids[1].sym, &pos);
        if (pos != e.kids[1].sym.size()) throw std::invalid_argument(e.kids[1].sym);
    } catch (const std::exception&) {
        throw InputError("fo: guided depth must be an integer");
    }
    if (k < 1) throw InputError("fo: guided depth must be at least 1");
    std::map<std::string, int> vars;
    for (int i = 0; i < k; ++i) {
        vars["x" + std::to_string(i + 1)] = 2 * i;
        vars["y" + std::to_string(i + 1)] = 2 * i + 1;
    }
    GuidedSentence s;
    s.k = k;
    s.matrix = matrix_of(e.kids[2], vars);
    s.validate();
    return s;
}

namespace {

void write_matrix(std::ostringstream& out, const FoTerm& t,
                  const std::function<std::string(int)>& name) {
    switch (t.kind) {
        case FoTerm::Kind::constant:
            out << (t.value ? "true" : "false");
            return;
        case FoTerm::Kind::relation:
            out << "(" << t.rel;
            for (int v : t.args) out << " " << name(v);
            out << ")";
            return;
        case FoTerm::Kind::equals:
            out << "(= " << name(t.args[0]) << " " << name(t.args[1]) << ")";
            return;
        case FoTerm::Kind::neg:
            out << "(not ";
            write_matrix(out, t.kids[0], name);
            out << ")";
            return;
        case FoTerm::Kind::conj:
        case FoTerm::Kind::disj:
            out << (t.kind == FoTerm::Kind::conj ? "(and" : "(or");
            for (const FoTerm& kid : t.kids) {
                out << " ";
                write_matrix(out, kid, name);
            }
            out << ")";
            return;
    }
}

}  // namespace

std::string write_fo(const PrenexSentence& s) {
    s.validate();
    std::ostringstream out;
    auto name = [](int v) { return "v" + std::to_string(v); };
    for (const QuantifierBlock& b : s.blocks) {
        out << (b.existential ? "(exists (" : "(forall (");
        for (size_t i = 0; i < b.vars.size(); ++i) out << (i ? " " : "") << name(b.vars[i]);
        out << ") ";
    }
    write_matrix(out, s.matrix, name);
    for (size_t i = 0; i < s.blocks.size(); ++i) out << ")";
    out << "\n";
    return out.str();
}

std::string write_fo(const GuidedSentence& s) {
    s.validate();
    std::ostringstream out;
    auto name = [](int v) {
        return (v % 2 == 0 ? "x" : "y") + std::to_string(v / 2 + 1);
    };
    out << "(guided " << s.k << " ";
    write_matrix(out, s.matrix, name);
    out << ")\n";
    return out.str();
}

}  // namespace csplab
