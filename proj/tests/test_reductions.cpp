#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "csplab/reductions.hpp"
#include "csplab/rng.hpp"
#include "csplab/solvers.hpp"
#include "doctest.h"

using namespace csplab;

namespace {

bool fsat(const NormalizedFormula& f, int k) {
    WeightedSatInstance w;
    w.formula = f;
    w.k = k;
    return weighted_sat_bruteforce(w).has_value();
}

bool isat(const BinCspInstance& inst) { return solve_bruteforce(inst, 200'000'000).has_value(); }

bool lsat(const ListColoringInstance& lc) { return isat(listcoloring_to_bincsp(lc)); }

ListColoringInstance to_lists(const PrecoloringInstance& pre) {
    ListColoringInstance lc;
    lc.graph = pre.graph;
    lc.colors = pre.colors;
    lc.lists.assign(size_t(pre.graph.n), pre.colors);
    for (auto [v, c] : pre.precolor) lc.lists[size_t(v)] = {c};
    return lc;
}

bool psat(const PrecoloringInstance& pre) { return lsat(to_lists(pre)); }

// And of Ors of all-negative conjunctions, one inner vector of variables per term
NormalizedFormula neg_formula(int num_vars,
                              const std::vector<std::vector<std::vector<int>>>& disjunctions) {
    NormalizedFormula f;
    f.num_vars = num_vars;
    std::vector<int> ors;
    for (const auto& d : disjunctions) {
        std::vector<int> terms;
        for (const auto& t : d) {
            std::vector<int> lits;
            for (int v : t) lits.push_back(f.add_lit(v, false));
            terms.push_back(f.add_and(lits));
        }
        ors.push_back(f.add_or(terms));
    }
    f.root = f.add_and(ors);
    return f;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

// parent array with -2 exactly on w, acyclic, every w-free edge ancestral,
// depth at most maxdepth
void require_modulator_witness(const Graph& g, std::vector<int> w,
                               const std::vector<int>& forest, int maxdepth) {
    std::sort(w.begin(), w.end());
    REQUIRE(int(forest.size()) == g.n);
    auto inw = [&](int v) { return std::binary_search(w.begin(), w.end(), v); };
    std::vector<std::vector<int>> chains(size_t(g.n));
    for (int v = 0; v < g.n; ++v) {
        if (inw(v)) {
            REQUIRE(forest[size_t(v)] == -2);
            continue;
        }
        int cur = v;
        while (cur >= 0) {
            chains[size_t(v)].push_back(cur);
            REQUIRE(chains[size_t(v)].size() <= forest.size());
            cur = forest[size_t(cur)];
            REQUIRE(cur != -2);
        }
        REQUIRE(int(chains[size_t(v)].size()) <= maxdepth);
    }
    for (auto [u, v] : g.edges) {
        if (inw(u) || inw(v)) continue;
        bool rel =
            std::find(chains[size_t(u)].begin(), chains[size_t(u)].end(), v) !=
                chains[size_t(u)].end() ||
            std::find(chains[size_t(v)].begin(), chains[size_t(v)].end(), u) !=
                chains[size_t(v)].end();
        REQUIRE(rel);
    }
}

int smallest_cover_size(const Graph& g) {
    for (int k = 0;; ++k)
        if (vertex_cover_exact(g, k)) return k;
}

std::vector<int> smallest_cover(const Graph& g) {
    return *vertex_cover_exact(g, smallest_cover_size(g));
}

std::vector<int> smallest_fvs(const Graph& g) {
    for (int k = 0;; ++k)
        if (auto w = feedback_vertex_set_exact(g, k)) return *w;
}

Modulator smallest_modulator(const Graph& g, int d) {
    for (int k = 0;; ++k)
        if (auto m = modulator_to_treedepth(g, d, k)) return *m;
}

// graph whose edges all touch 0..k-1, with color lists over 0..m-1
ListColoringInstance random_covered_listcol(uint64_t seed, int n, int k, int m) {
    Rng rng(seed);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (u < k && rng.chance(0.55)) edges.emplace_back(u, v);
    ListColoringInstance lc;
    lc.graph = Graph(n, std::move(edges));
    for (int c = 0; c < m; ++c) lc.colors.push_back(c);
    lc.lists.assign(size_t(n), {});
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < m; ++c)
            if (rng.chance(0.7)) lc.lists[size_t(v)].push_back(c);
    return lc;
}

PrecoloringInstance random_precoloring(uint64_t seed, const Graph& g, int m,
                                       double color_prob) {
    Rng rng(seed);
    PrecoloringInstance pre;
    pre.graph = g;
    for (int c = 0; c < m; ++c) pre.colors.push_back(c);
    for (int v = 0; v < g.n; ++v)
        if (m > 0 && rng.chance(color_prob)) pre.precolor[v] = int(rng.below(uint64_t(m)));
    return pre;
}

} // namespace

TEST_CASE("clique hardness maps handle hand instances") {
    // two disjuncts, one negative literal each
    auto f = neg_formula(2, {{{0}, {1}}});
    auto out = wsat3am_to_bincsp_vc(f, 1);
    REQUIRE(out.instance.n == 2);
    CHECK(out.instance.domains[0] == std::vector<int>{0, 1});
    CHECK(out.instance.domains[1] == std::vector<int>{1, 2});
    CHECK(out.instance.pair_allowed(1, 0, 1, 1));
    CHECK(out.instance.pair_allowed(1, 0, 2, 0));
    CHECK(!out.instance.pair_allowed(1, 0, 1, 0));
    CHECK(!out.instance.pair_allowed(1, 0, 2, 1));
    CHECK(out.modulator == std::vector<int>{0});
    CHECK(out.forest == std::vector<int>{-2, -1});
    CHECK(out.report.rule == "wsat3am_to_bincsp_vc");
    CHECK(out.report.parameter_value == 1);
    auto sol = solve_bruteforce(out.instance);
    REQUIRE(sol.has_value());
    CHECK(*sol == std::vector<int>{0, 2});

    // weight above the variable count yields the canonical unsatisfiable instance
    auto degenerate = wsat3am_to_bincsp_vc(f, 3);
    CHECK(degenerate.instance.n == 1);
    CHECK(degenerate.instance.domains == std::vector<std::vector<int>>{{}});
    CHECK(degenerate.forest == std::vector<int>{-1});
    CHECK(degenerate.modulator.empty());
    CHECK(!solve_bruteforce(degenerate.instance).has_value());

    // empty conjunction is always satisfiable at weight zero
    NormalizedFormula top;
    top.root = top.add_and({});
    auto empty_out = wsat3am_to_bincsp_vc(top, 0);
    CHECK(empty_out.instance.n == 0);
    CHECK(isat(empty_out.instance));
    CHECK(!wsat3am_to_bincsp_vc(top, 1).modulator.size());
    CHECK(!isat(wsat3am_to_bincsp_vc(top, 1).instance));

    CHECK_THROWS_AS(wsat3am_to_bincsp_vc(f, -1), InputError);
    NormalizedFormula pos;
    pos.num_vars = 1;
    pos.root = pos.add_and({pos.add_or({pos.add_and({pos.add_lit(0, true)})})});
    CHECK_THROWS_AS(wsat3am_to_bincsp_vc(pos, 1), InputError);

    // deep chain: And Or And Or And over one negated variable
    NormalizedFormula chain;
    chain.num_vars = 2;
    int lit = chain.add_lit(0, false);
    int and5 = chain.add_and({lit});
    int or4 = chain.add_or({and5});
    int and3 = chain.add_and({or4});
    int or2 = chain.add_or({and3});
    chain.root = chain.add_and({or2});
    REQUIRE(normalization_level(chain) == 5);
    CHECK_THROWS_AS(wsat3am_to_bincsp_vc(chain, 1), InputError);

    auto deep = wsat2d1am_to_bincsp_forest_modulator(chain, 1, 2);
    REQUIRE(deep.instance.n == 3);
    CHECK(deep.instance.domains[0] == std::vector<int>{0, 1});
    CHECK(deep.instance.domains[1] == std::vector<int>{1});
    CHECK(deep.instance.domains[2] == std::vector<int>{0, 1});
    CHECK(deep.instance.pair_allowed(1, 2, 1, 1));
    CHECK(!deep.instance.pair_allowed(1, 2, 1, 0));
    CHECK(!deep.instance.has_edge(0, 1));
    CHECK(deep.instance.pair_allowed(2, 0, 0, 0));
    CHECK(deep.instance.pair_allowed(2, 0, 0, 1));
    CHECK(deep.instance.pair_allowed(2, 0, 1, 1));
    CHECK(!deep.instance.pair_allowed(2, 0, 1, 0));
    CHECK(deep.forest == std::vector<int>{-2, -1, 1});
    CHECK(deep.modulator == std::vector<int>{0});
    auto deep_sol = solve_bruteforce(deep.instance);
    REQUIRE(deep_sol.has_value());
    CHECK(*deep_sol == std::vector<int>{1, 1, 1});
    CHECK_THROWS_AS(wsat2d1am_to_bincsp_forest_modulator(chain, 1, 1), InputError);
    CHECK_THROWS_AS(wsat2d1am_to_bincsp_forest_modulator(chain, 1, 0), InputError);

    // feedback map accepts any level and rounds the target up to an odd one
    auto fvs_out = wsatam_to_bincsp_fvs(chain, 1);
    CHECK(fvs_out.report.rule == "wsatam_to_bincsp_fvs");
    CHECK(write_bincsp(fvs_out.instance) == write_bincsp(deep.instance));
}

TEST_CASE("clique hardness maps agree with the weighted oracle") {
    int sat = 0, unsat = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Rng rng(trial_seed(41001, uint64_t(trial)));
        int nv = 1 + int(rng.below(6));
        int width = 1 + int(rng.below(3));
        int k = int(rng.below(uint64_t(std::min(nv, 4) + 2)));
        auto f = random_normalized_formula(3, nv, width, trial_seed(41002, uint64_t(trial)), -1);
        auto out = wsat3am_to_bincsp_vc(f, k);
        bool expect = fsat(f, k);
        bool got = isat(out.instance);
        CHECK(expect == got);
        (got ? sat : unsat) += 1;

        // the modulator is a vertex cover and drives the cover solver
        Graph g = out.instance.gaifman();
        for (auto [u, v] : g.edges) {
            bool covered = std::binary_search(out.modulator.begin(), out.modulator.end(), u) ||
                           std::binary_search(out.modulator.begin(), out.modulator.end(), v);
            REQUIRE(covered);
        }
        if (k <= nv) CHECK(int(out.modulator.size()) == k);
        CHECK(solve_by_vertex_cover(out.instance, out.modulator).has_value() == got);
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
}

TEST_CASE("generalized hardness at depth one matches the flat construction") {
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng(trial_seed(42001, uint64_t(trial)));
        int nv = 1 + int(rng.below(5));
        int k = int(rng.below(uint64_t(nv + 2)));
        auto f = random_normalized_formula(3, nv, 3, trial_seed(42002, uint64_t(trial)), -1);
        auto flat = wsat3am_to_bincsp_vc(f, k);
        auto deep = wsat2d1am_to_bincsp_forest_modulator(f, k, 1);
        CHECK(write_bincsp(flat.instance) == write_bincsp(deep.instance));
        CHECK(flat.modulator == deep.modulator);
        CHECK(flat.forest == deep.forest);
    }
}

TEST_CASE("forest hardness matches the weighted oracle and carries witnesses") {
    int sat = 0, unsat = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(trial_seed(43001, uint64_t(trial)));
        int nv = 1 + int(rng.below(4));
        int k = int(rng.below(uint64_t(std::min(nv, 3) + 1)));
        int level = rng.chance(0.5) ? 3 : 5;
        auto f = random_normalized_formula(level, nv, 2, trial_seed(43002, uint64_t(trial)), -1);
        auto out = wsat2d1am_to_bincsp_forest_modulator(f, k, 2);
        bool expect = fsat(f, k);
        bool got = isat(out.instance);
        CHECK(expect == got);
        (got ? sat : unsat) += 1;

        Graph g = out.instance.gaifman();
        require_modulator_witness(g, out.modulator, out.forest, 2);
        CHECK(int(out.modulator.size()) == k);
        EliminationForest ef;
        ef.parent = out.forest;
        CHECK(solve_by_modulator(out.instance, out.modulator, ef).has_value() == got);
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
}

TEST_CASE("feedback hardness agrees with the forest construction and the oracle") {
    int sat = 0, unsat = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(trial_seed(44001, uint64_t(trial)));
        int nv = 1 + int(rng.below(4));
        int k = int(rng.below(uint64_t(std::min(nv, 3) + 1)));
        int level = rng.chance(0.5) ? 3 : 5;
        auto f = random_normalized_formula(level, nv, 2, trial_seed(44002, uint64_t(trial)), -1);
        auto out = wsatam_to_bincsp_fvs(f, k);
        bool got = isat(out.instance);
        CHECK(fsat(f, k) == got);
        (got ? sat : unsat) += 1;

        int target = std::max(3, level % 2 == 0 ? level + 1 : level);
        auto ref = wsat2d1am_to_bincsp_forest_modulator(f, k, (target - 1) / 2);
        CHECK(write_bincsp(out.instance) == write_bincsp(ref.instance));
        CHECK(out.forest == ref.forest);

        // removing the modulator leaves a forest
        Graph g = out.instance.gaifman();
        std::vector<int> keepid(size_t(g.n), -1);
        int kept = 0;
        for (int v = 0; v < g.n; ++v)
            if (!std::binary_search(out.modulator.begin(), out.modulator.end(), v))
                keepid[size_t(v)] = kept++;
        std::vector<std::pair<int, int>> sub;
        for (auto [u, v] : g.edges)
            if (keepid[size_t(u)] >= 0 && keepid[size_t(v)] >= 0)
                sub.emplace_back(keepid[size_t(u)], keepid[size_t(v)]);
        CHECK(Graph(kept, std::move(sub)).is_acyclic());
        if (k <= nv) CHECK(int(out.modulator.size()) == k);
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
}

TEST_CASE("cover to weighted formula extraction round trips") {
    BinCspInstance inst;
    inst.n = 2;
    inst.domains = {{0, 1}, {0, 1}};
    inst.add_constraint(0, 1, {{0, 1}, {1, 0}});
    auto out = bincsp_vc_to_wsat3(inst, {0});
    CHECK(out.k == 1);
    CHECK(normalization_level(out.formula) <= 3);
    CHECK(weighted_sat_bruteforce(out).has_value());

    auto both = bincsp_vc_to_wsat3(inst, {0, 1});
    CHECK(both.k == 2);
    CHECK(weighted_sat_bruteforce(both).has_value());

    BinCspInstance bare;
    bare.n = 3;
    bare.domains = {{5}, {}, {2, 4}};
    auto empty_dom = bincsp_vc_to_wsat3(bare, {});
    CHECK(empty_dom.k == 0);
    CHECK(!weighted_sat_bruteforce(empty_dom).has_value());

    BinCspInstance uncovered;
    uncovered.n = 3;
    uncovered.domains = {{0}, {0}, {0}};
    uncovered.add_constraint(1, 2, {{0, 0}});
    CHECK_THROWS_AS(bincsp_vc_to_wsat3(uncovered, {0}), InputError);
    CHECK_THROWS_AS(bincsp_vc_to_wsat3(inst, {0, 0}), InputError);
    CHECK_THROWS_AS(bincsp_vc_to_wsat3(inst, {2}), InputError);

    int sat = 0, unsat = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Rng rng(trial_seed(45001, uint64_t(trial)));
        int n = 2 + int(rng.below(5));
        int dom = 1 + int(rng.below(3));
        auto cspi = random_instance(n, dom, 0.5, 0.5, trial_seed(45002, uint64_t(trial)));
        auto cover = smallest_cover(cspi.gaifman());
        auto wsat = bincsp_vc_to_wsat3(cspi, cover);
        CHECK(wsat.k == int(cover.size()));
        CHECK(normalization_level(wsat.formula) <= 3);
        bool got = weighted_sat_bruteforce(wsat).has_value();
        CHECK(isat(cspi) == got);
        (got ? sat : unsat) += 1;
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
}

TEST_CASE("modulator to weighted formula extraction round trips") {
    // depth-3 path with fat domains overflows a small family cap
    BinCspInstance path;
    path.n = 3;
    std::vector<int> ten;
    for (int a = 0; a < 10; ++a) ten.push_back(a);
    path.domains.assign(3, ten);
    std::vector<std::pair<int, int>> full;
    for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b) full.emplace_back(a, b);
    path.add_constraint(0, 1, full);
    path.add_constraint(1, 2, full);
    CHECK_THROWS_AS(bincsp_modtd_to_wsat2d1(path, {}, {-1, 0, 1}, 500), ResourceError);
    CHECK(weighted_sat_bruteforce(bincsp_modtd_to_wsat2d1(path, {}, {-1, 0, 1})).has_value());

    // forest whose parents are not neighbors still works via edge completion
    BinCspInstance star;
    star.n = 3;
    star.domains = {{0, 1}, {0, 1}, {0, 1}};
    star.add_constraint(1, 2, {{0, 1}, {1, 0}});
    auto completed = bincsp_modtd_to_wsat2d1(star, {}, {-1, 0, 1});
    CHECK(weighted_sat_bruteforce(completed).has_value() == isat(star));

    BinCspInstance tri;
    tri.n = 3;
    tri.domains = {{0}, {0}, {0}};
    tri.add_constraint(0, 1, {{0, 0}});
    tri.add_constraint(0, 2, {{0, 0}});
    tri.add_constraint(1, 2, {{0, 0}});
    CHECK_THROWS_AS(bincsp_modtd_to_wsat2d1(tri, {}, {-1, 0, 0}), InputError);
    CHECK_THROWS_AS(bincsp_modtd_to_wsat2d1(tri, {0}, {-2, -1, 0}), InputError);
    CHECK(weighted_sat_bruteforce(bincsp_modtd_to_wsat2d1(tri, {0}, {-2, -1, 1})).has_value());

    int sat = 0, unsat = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(trial_seed(46001, uint64_t(trial)));
        int n = 2 + int(rng.below(5));
        int dom = 1 + int(rng.below(3));
        auto cspi = random_instance(n, dom, 0.4, 0.6, trial_seed(46002, uint64_t(trial)));
        auto mod = smallest_modulator(cspi.gaifman(), 2);
        auto wsat = bincsp_modtd_to_wsat2d1(cspi, mod.vertices, mod.forest.parent);
        CHECK(wsat.k == int(mod.vertices.size()));
        CHECK(normalization_level(wsat.formula) <= 5);
        bool got = weighted_sat_bruteforce(wsat).has_value();
        CHECK(isat(cspi) == got);
        (got ? sat : unsat) += 1;
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
}

TEST_CASE("feedback set to circuit extraction round trips") {
    BinCspInstance tri;
    tri.n = 3;
    tri.domains = {{0, 1}, {0, 1}, {0, 1}};
    tri.add_constraint(0, 1, {{0, 1}, {1, 0}});
    tri.add_constraint(0, 2, {{0, 1}, {1, 0}});
    tri.add_constraint(1, 2, {{0, 1}, {1, 0}});
    CHECK_THROWS_AS(bincsp_fvs_to_circuit(tri, {}), InputError);
    auto out = bincsp_fvs_to_circuit(tri, {0});
    CHECK(out.k == 1);
    CHECK(out.report.rule == "bincsp_fvs_to_circuit");
    CHECK(!weighted_circuit_sat_bruteforce(out.circuit, out.k).has_value());

    BinCspInstance tri3 = tri;
    tri3.domains = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
    tri3.constraints.clear();
    std::vector<std::pair<int, int>> neq;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b) neq.emplace_back(a, b);
    tri3.add_constraint(0, 1, neq);
    tri3.add_constraint(0, 2, neq);
    tri3.add_constraint(1, 2, neq);
    auto out3 = bincsp_fvs_to_circuit(tri3, {0});
    CHECK(weighted_circuit_sat_bruteforce(out3.circuit, out3.k).has_value());

    BinCspInstance nothing;
    nothing.n = 0;
    auto trivially = bincsp_fvs_to_circuit(nothing, {});
    CHECK(trivially.k == 0);
    CHECK(weighted_circuit_sat_bruteforce(trivially.circuit, 0).has_value());

    int sat = 0, unsat = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(trial_seed(47001, uint64_t(trial)));
        int n = 2 + int(rng.below(5));
        int dom = 1 + int(rng.below(3));
        auto cspi = random_instance(n, dom, 0.5, 0.5, trial_seed(47002, uint64_t(trial)));
        auto fvs = smallest_fvs(cspi.gaifman());
        auto cwb = bincsp_fvs_to_circuit(cspi, fvs);
        CHECK(cwb.k == int(fvs.size()));
        bool got = weighted_circuit_sat_bruteforce(cwb.circuit, cwb.k).has_value();
        CHECK(isat(cspi) == got);
        (got ? sat : unsat) += 1;
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
}

TEST_CASE("list coloring cover formula handles crafted groups") {
    // star: one cover vertex, three members sharing its class
    ListColoringInstance star;
    star.graph = Graph(4, {{0, 1}, {0, 2}, {0, 3}});
    star.colors = {0, 1};
    star.lists = {{0, 1}, {0, 1}, {0, 1}, {0, 1}};
    auto out = listcoloring_vc_to_wsat2(star, {0});
    CHECK(out.k == 5);
    CHECK(normalization_level(out.formula) <= 2);
    CHECK(weighted_sat_bruteforce(out).has_value());
    CHECK(lsat(star));

    // single-color lists across an edge are infeasible
    ListColoringInstance clash = star;
    clash.lists = {{0}, {0}, {0, 1}, {0, 1}};
    auto clash_out = listcoloring_vc_to_wsat2(clash, {0});
    CHECK(!lsat(clash));
    CHECK(!weighted_sat_bruteforce(clash_out).has_value());

    // two nonadjacent cover vertices may share a color; members then need the
    // wrap gap that opens when the sorted sequence is constant
    ListColoringInstance pairfree;
    pairfree.graph = Graph(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
    pairfree.colors = {0, 1};
    pairfree.lists = {{0}, {0}, {0, 1}, {0, 1}};
    auto pf = listcoloring_vc_to_wsat2(pairfree, {0, 1});
    CHECK(pf.k == 10);
    CHECK(lsat(pairfree));
    CHECK(weighted_sat_bruteforce(pf).has_value());

    // adjacent cover vertices exhaust a two-color palette for shared members
    ListColoringInstance paircolored;
    paircolored.graph = Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
    paircolored.colors = {0, 1};
    paircolored.lists = {{0, 1}, {0, 1}, {0, 1}, {0, 1}};
    auto pc = listcoloring_vc_to_wsat2(paircolored, {0, 1});
    CHECK(pc.k == 10);
    CHECK(!lsat(paircolored));
    CHECK(!weighted_sat_bruteforce(pc).has_value());

    // isolated member with an empty list sinks the formula
    ListColoringInstance lonely;
    lonely.graph = Graph(2, {});
    lonely.colors = {0};
    lonely.lists = {{0}, {}};
    CHECK(!weighted_sat_bruteforce(listcoloring_vc_to_wsat2(lonely, {})).has_value());
    lonely.lists = {{0}, {0}};
    CHECK(weighted_sat_bruteforce(listcoloring_vc_to_wsat2(lonely, {})).has_value());

    ListColoringInstance bad;
    bad.graph = Graph(3, {{1, 2}});
    bad.colors = {0};
    bad.lists = {{0}, {0}, {0}};
    CHECK_THROWS_AS(listcoloring_vc_to_wsat2(bad, {0}), InputError);
}

TEST_CASE("list coloring cover formula agrees with the coloring oracle") {
    int sat = 0, unsat = 0, accepted = 0;
    uint64_t bump = 0;
    while (accepted < 100) {
        REQUIRE(bump < 3000);
        uint64_t seed = trial_seed(48001, bump++);
        Rng rng(seed);
        int variant = int(rng.below(4));
        int k = variant == 0 ? 2 : 1;
        int m = variant == 1 ? 3 : 2;
        int n = k + 1 + int(rng.below(4));
        auto lc = random_covered_listcol(trial_seed(48002, bump), n, k, m);
        auto out = listcoloring_vc_to_wsat2(lc, [&] {
            std::vector<int> w;
            for (int v = 0; v < k; ++v) w.push_back(v);
            return w;
        }());
        if (binom(out.formula.num_vars, out.k) > 150000) continue;
        ++accepted;

        // declared weight counts cover plus four helpers per class member
        auto adj = lc.graph.adjacency();
        std::set<std::vector<int>> classes;
        for (int v = k; v < n; ++v) classes.insert(adj[size_t(v)]);
        int expect_k = k;
        for (const auto& nb : classes) expect_k += 4 * int(nb.size());
        CHECK(out.k == expect_k);
        CHECK(normalization_level(out.formula) <= 2);

        bool got = weighted_sat_bruteforce(out).has_value();
        CHECK(lsat(lc) == got);
        (got ? sat : unsat) += 1;
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
}

TEST_CASE("list coloring becomes precoloring extension via pendants") {
    ListColoringInstance lc;
    lc.graph = Graph(2, {{0, 1}});
    lc.colors = {0, 1, 2};
    lc.lists = {{0}, {0, 1, 2}};
    auto out = listcoloring_to_precolext(lc, {}, {-1, 0});
    CHECK(out.instance.graph.n == 4);
    CHECK(out.instance.precolor.size() == 2);
    CHECK(out.instance.precolor.at(2) == 1);
    CHECK(out.instance.precolor.at(3) == 2);
    CHECK(out.instance.graph.has_edge(0, 2));
    CHECK(out.instance.graph.has_edge(0, 3));
    CHECK(out.forest == std::vector<int>{-1, 0, 0, 0});
    CHECK(out.report.rule == "listcoloring_to_precolext");

    // pendant of a modulator vertex becomes its own root
    auto rooted = listcoloring_to_precolext(lc, {0}, {-2, -1});
    CHECK(rooted.forest == std::vector<int>{-2, -1, -1, -1});

    int sat = 0, unsat = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(trial_seed(49001, uint64_t(trial)));
        int n = 2 + int(rng.below(4));
        int m = 1 + int(rng.below(3));
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng.chance(0.5)) edges.emplace_back(u, v);
        ListColoringInstance inst;
        inst.graph = Graph(n, std::move(edges));
        for (int c = 0; c < m; ++c) inst.colors.push_back(c);
        inst.lists.assign(size_t(n), {});
        for (int v = 0; v < n; ++v)
            for (int c = 0; c < m; ++c)
                if (rng.chance(0.65)) inst.lists[size_t(v)].push_back(c);

        auto mod = smallest_modulator(inst.graph, 2);
        auto pre = listcoloring_to_precolext(inst, mod.vertices, mod.forest.parent);
        require_modulator_witness(pre.instance.graph, pre.modulator, pre.forest, 3);
        for (int v = 0; v < n; ++v) CHECK(!pre.instance.precolor.count(v));
        bool got = psat(pre.instance);
        CHECK(lsat(inst) == got);
        (got ? sat : unsat) += 1;
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
}

TEST_CASE("precoloring cover kernel branches and shrinks") {
    // palette within the cover budget: solved on the spot
    PrecoloringInstance tri;
    tri.graph = Graph(3, {{0, 1}, {0, 2}, {1, 2}});
    tri.colors = {0, 1};
    auto solved = precolext_vc_kernel(tri, {0, 1});
    CHECK(solved.decided);
    CHECK(!solved.satisfiable);
    tri.colors = {0, 1, 2};
    auto solved3 = precolext_vc_kernel(tri, {0, 1, 2});
    CHECK(solved3.decided);
    CHECK(solved3.satisfiable);

    // conflicting precolored neighbors
    PrecoloringInstance clash;
    clash.graph = Graph(3, {{0, 1}, {1, 2}});
    clash.colors = {0, 1, 2};
    clash.precolor = {{0, 0}, {1, 0}};
    auto conflicted = precolext_vc_kernel(clash, {1});
    CHECK(conflicted.decided);
    CHECK(!conflicted.satisfiable);

    // wide lists leave the kernel empty
    PrecoloringInstance star;
    star.graph = Graph(4, {{0, 1}, {0, 2}, {0, 3}});
    star.colors = {0, 1, 2, 3, 4};
    star.precolor = {{1, 0}, {2, 1}, {3, 2}};
    auto wide = precolext_vc_kernel(star, {0});
    CHECK(wide.decided);
    CHECK(wide.satisfiable);

    // tight list survives into the kernel
    PrecoloringInstance kept;
    kept.graph = Graph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {4, 5}});
    kept.colors = {0, 1, 2, 3};
    kept.precolor = {{1, 0}, {2, 1}, {3, 2}, {5, 3}};
    auto res = precolext_vc_kernel(kept, {0, 4});
    REQUIRE(!res.decided);
    CHECK(res.kernel_vertices == std::vector<int>{0});
    REQUIRE(res.kernel.graph.n == 1);
    CHECK(res.kernel.lists == std::vector<std::vector<int>>{{3}});
    CHECK(lsat(res.kernel) == psat(kept));

    int sat = 0, unsat = 0, kernels = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(trial_seed(50001, uint64_t(trial)));
        int k = 1 + int(rng.below(2));
        int n = k + 1 + int(rng.below(5));
        int m = 1 + int(rng.below(5));
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (u < k && rng.chance(0.5)) edges.emplace_back(u, v);
        Graph g(n, std::move(edges));
        auto pre = random_precoloring(trial_seed(50002, uint64_t(trial)), g, m, 0.45);
        std::vector<int> cover;
        for (int v = 0; v < k; ++v) cover.push_back(v);

        auto out = precolext_vc_kernel(pre, cover);
        bool expect = psat(pre);
        if (out.decided) {
            CHECK(out.satisfiable == expect);
        } else {
            ++kernels;
            CHECK(lsat(out.kernel) == expect);
            for (const auto& list : out.kernel.lists) CHECK(int(list.size()) < k);
            for (int v : out.kernel_vertices) {
                CHECK(std::binary_search(cover.begin(), cover.end(), v));
                CHECK(!pre.precolor.count(v));
            }
        }
        (expect ? sat : unsat) += 1;
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
    CHECK(kernels > 0);
}

TEST_CASE("precoloring modulator strip peels and shrinks") {
    // palette within depth plus modulator: solved on the spot
    PrecoloringInstance path;
    path.graph = Graph(3, {{0, 1}, {1, 2}});
    path.colors = {0, 1};
    auto solved = precolext_modtd_strip(path, {}, {1, -1, 1});
    CHECK(solved.decided);
    CHECK(solved.satisfiable);

    // nothing precolored and a roomy palette peels everything
    path.colors = {0, 1, 2};
    auto peeled = precolext_modtd_strip(path, {}, {1, -1, 1});
    CHECK(peeled.decided);
    CHECK(peeled.satisfiable);

    // conflicting precolored neighbors
    PrecoloringInstance clash;
    clash.graph = Graph(3, {{0, 1}, {1, 2}});
    clash.colors = {0, 1, 2, 3};
    clash.precolor = {{0, 2}, {1, 2}};
    auto conflicted = precolext_modtd_strip(clash, {}, {-1, 0, 1});
    CHECK(conflicted.decided);
    CHECK(!conflicted.satisfiable);

    // a hub with many precolored leaves survives the peel
    PrecoloringInstance hub;
    hub.graph = Graph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    hub.colors = {0, 1, 2, 3};
    hub.precolor = {{1, 0}, {2, 1}, {3, 2}, {4, 3}, {5, 0}};
    auto res = precolext_modtd_strip(hub, {}, {-1, 0, 0, 0, 0, 0});
    REQUIRE(!res.decided);
    CHECK(res.kept == std::vector<int>{0});
    CHECK(res.instance.lists == std::vector<std::vector<int>>{{}});
    CHECK(res.forest == std::vector<int>{-1});
    CHECK(!lsat(res.instance));
    CHECK(!psat(hub));

    auto open = hub;
    open.precolor = {{1, 0}, {2, 1}, {3, 2}, {4, 0}, {5, 1}};
    auto res2 = precolext_modtd_strip(open, {}, {-1, 0, 0, 0, 0, 0});
    REQUIRE(!res2.decided);
    CHECK(res2.instance.lists == std::vector<std::vector<int>>{{3}});
    CHECK(lsat(res2.instance));
    CHECK(psat(open));

    int sat = 0, unsat = 0, kept_runs = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(trial_seed(51001, uint64_t(trial)));
        bool hubby = trial >= 50;
        int n = hubby ? 5 + int(rng.below(3)) : 2 + int(rng.below(5));
        int m = hubby ? 3 + int(rng.below(3)) : 1 + int(rng.below(6));
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if ((hubby && u == 0) || rng.chance(hubby ? 0.1 : 0.45))
                    edges.emplace_back(u, v);
        Graph g(n, std::move(edges));
        auto pre = random_precoloring(trial_seed(51002, uint64_t(trial)), g, m,
                                      hubby ? 0.75 : 0.5);
        auto mod = smallest_modulator(g, 2);
        int d = 0;
        for (int v = 0; v < n; ++v)
            if (!std::binary_search(mod.vertices.begin(), mod.vertices.end(), v))
                d = std::max(d, mod.forest.depth_of(v));

        auto out = precolext_modtd_strip(pre, mod.vertices, mod.forest.parent);
        bool expect = psat(pre);
        if (out.decided) {
            CHECK(out.satisfiable == expect);
        } else {
            ++kept_runs;
            CHECK(lsat(out.instance) == expect);
            require_modulator_witness(out.instance.graph, out.modulator, out.forest,
                                      std::max(d - 1, 0));
            for (int v : out.kept) CHECK(!pre.precolor.count(v));
        }
        (expect ? sat : unsat) += 1;
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
    CHECK(kept_runs > 0);
}

TEST_CASE("reduction output sizes stay put") {
    std::vector<long> sizes;
    for (int i = 0; i < 3; ++i) {
        auto f = random_normalized_formula(3, 4, 3, trial_seed(52001, uint64_t(i)), -1);
        sizes.push_back(long(write_bincsp(wsat3am_to_bincsp_vc(f, 2).instance).size()));
    }
    for (int i = 0; i < 3; ++i) {
        auto f = random_normalized_formula(5, 3, 2, trial_seed(52002, uint64_t(i)), -1);
        sizes.push_back(
            long(write_bincsp(wsat2d1am_to_bincsp_forest_modulator(f, 1, 2).instance).size()));
        sizes.push_back(long(write_bincsp(wsatam_to_bincsp_fvs(f, 2).instance).size()));
    }
    for (int i = 0; i < 3; ++i) {
        auto inst = random_instance(5, 3, 0.6, 0.5, trial_seed(52003, uint64_t(i)));
        Graph g = inst.gaifman();
        sizes.push_back(long(write_wsat(bincsp_vc_to_wsat3(inst, smallest_cover(g))).size()));
        auto mod = smallest_modulator(g, 2);
        sizes.push_back(
            long(write_wsat(bincsp_modtd_to_wsat2d1(inst, mod.vertices, mod.forest.parent))
                     .size()));
        sizes.push_back(
            long(write_circuit(bincsp_fvs_to_circuit(inst, smallest_fvs(g)).circuit).size()));
    }
    for (int i = 0; i < 2; ++i) {
        auto lc = random_covered_listcol(trial_seed(52004, uint64_t(i)), 5, 1, 2);
        sizes.push_back(long(write_wsat(listcoloring_vc_to_wsat2(lc, {0})).size()));
        auto mod = smallest_modulator(lc.graph, 2);
        auto pre = listcoloring_to_precolext(lc, mod.vertices, mod.forest.parent);
        sizes.push_back(long(write_precoloring(pre.instance).size()));
    }

    std::vector<long> expected = {258, 171, 288, 261, 428, 284, 459, 266, 429, 308, 278,
                                  458, 181, 143, 327, 231, 114, 396, 269, 109, 280, 96};
    CHECK(sizes == expected);
}
