#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "csplab/rng.hpp"
#include "csplab/structure.hpp"

using namespace csplab;

namespace {

Graph path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph(n, e);
}

Graph cycle(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, e);
}

Graph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Graph(n, e);
}

// Minimum elimination-forest depth found by trying every parent array.
// Independent of the subset recursion in treedepth_exact; only usable for
// very small n.
int treedepth_bruteforce(const Graph& g) {
    int n = g.n;
    if (n == 0) return 0;
    std::vector<int> parent(size_t(n), -1);
    int best = n + 1;
    std::function<void(int)> go = [&](int v) {
        if (v == n) {
            EliminationForest f{parent};
            std::string why;
            for (int u = 0; u < n; ++u) {  // reject parent cycles cheaply
                int steps = 0, cur = u;
                while (cur != -1) {
                    if (++steps > n) return;
                    cur = parent[size_t(cur)];
                }
            }
            if (validate_elimination_forest(g, f)) best = std::min(best, f.depth());
            return;
        }
        for (int p = -1; p < n; ++p) {
            if (p == v) continue;
            parent[size_t(v)] = p;
            go(v + 1);
        }
        parent[size_t(v)] = -1;
    };
    go(0);
    return best;
}

RootedTree random_tree(Rng& rng, int max_nodes, int max_leaves) {
    while (true) {
        int n = rng.range(1, max_nodes);
        std::vector<int> parent(size_t(n), -1);
        for (int v = 1; v < n; ++v) parent[size_t(v)] = int(rng.below(uint64_t(v)));
        RootedTree t = RootedTree::from_parents(parent);
        if (int(t.leaves_preorder().size()) <= max_leaves) return t;
    }
}

} // namespace

TEST_CASE("graph basics") {
    Graph g(4, {{2, 1}, {1, 2}, {0, 3}});
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 3}, {1, 2}});
    CHECK(g.has_edge(2, 1));
    CHECK(!g.has_edge(0, 1));
    CHECK_THROWS_AS(Graph(2, {{0, 0}}), InputError);
    CHECK_THROWS_AS(Graph(2, {{0, 5}}), InputError);

    CHECK(path(5).is_acyclic());
    CHECK(!cycle(4).is_acyclic());
    auto comps = Graph(5, {{0, 2}, {3, 4}}).components();
    REQUIRE(comps.size() == 3);
    CHECK(comps[0] == std::vector<int>{0, 2});
    CHECK(comps[1] == std::vector<int>{1});
    CHECK(comps[2] == std::vector<int>{3, 4});
}

TEST_CASE("graph file format") {
    Graph g = path(4);
    Graph back = parse_graph(write_graph(g));
    CHECK(back.n == 4);
    CHECK(back.edges == g.edges);
    CHECK_THROWS_WITH_AS(parse_graph("graph 2\nedge 0 2\n"), doctest::Contains("line 2"),
                         InputError);
    CHECK_THROWS_AS(parse_graph("grap 2\n"), InputError);
}

TEST_CASE("treedepth of paths matches the ceil-log formula") {
    for (int n = 1; n <= 15; ++n) {
        auto [d, f] = treedepth_exact(path(n));
        CHECK(d == int(std::ceil(std::log2(n + 1))));
        CHECK(validate_elimination_forest(path(n), f));
        CHECK(f.depth() == d);
    }
}

TEST_CASE("treedepth agrees with forest brute force on tiny graphs") {
    // every graph on 4 vertices
    for (int bits = 0; bits < 64; ++bits) {
        std::vector<std::pair<int, int>> all{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < 6; ++i)
            if (bits & (1 << i)) e.push_back(all[size_t(i)]);
        Graph g(4, e);
        auto [d, f] = treedepth_exact(g);
        CHECK(validate_elimination_forest(g, f));
        CHECK(f.depth() == d);
        CHECK(d == treedepth_bruteforce(g));
    }
}

TEST_CASE("treedepth witness examples") {
    auto [d5, f5] = treedepth_exact(cycle(5));
    CHECK(d5 == 1 + treedepth_exact(path(4)).first);
    CHECK(validate_elimination_forest(cycle(5), f5));

    auto [dk, fk] = treedepth_exact(complete(4));
    CHECK(dk == 4);
    CHECK(validate_elimination_forest(complete(4), fk));

    auto [de, fe] = treedepth_exact(Graph(0, {}));
    CHECK(de == 0);
    CHECK(fe.size() == 0);
}

TEST_CASE("elimination forest validation rejects bad witnesses") {
    Graph g = path(3);
    CHECK(validate_elimination_forest(g, EliminationForest{{-1, 0, 1}}));
    // 0-1 edge joins siblings here
    std::string why;
    CHECK(!validate_elimination_forest(g, EliminationForest{{2, 2, -1}}, &why));
    CHECK(why.find("unrelated") != std::string::npos);
    CHECK(!validate_elimination_forest(g, EliminationForest{{-1, 0}}, &why));
    // parent cycle
    CHECK(!validate_elimination_forest(g, EliminationForest{{1, 0, -1}}, &why));
}

TEST_CASE("vertex cover exact") {
    CHECK(vertex_cover_exact(cycle(5), 2) == std::nullopt);
    auto w = vertex_cover_exact(cycle(5), 3);
    REQUIRE(w.has_value());
    CHECK(*w == std::vector<int>{0, 1, 3});  // lexicographically first among size 3
    CHECK(*vertex_cover_exact(path(4), 2) == std::vector<int>{0, 2});
    CHECK(*vertex_cover_exact(Graph(3, {}), 0) == std::vector<int>{});
    CHECK(*vertex_cover_exact(Graph(1, {}), 5) == std::vector<int>{});
}

TEST_CASE("feedback vertex set exact") {
    CHECK(*feedback_vertex_set_exact(cycle(5), 1) == std::vector<int>{0});
    CHECK(feedback_vertex_set_exact(complete(4), 1) == std::nullopt);
    CHECK(*feedback_vertex_set_exact(complete(4), 2) == std::vector<int>{0, 1});
    CHECK(*feedback_vertex_set_exact(path(6), 0) == std::vector<int>{});
}

TEST_CASE("modulator to treedepth") {
    // star: removing the centre leaves an edgeless graph
    Graph star(4, {{0, 1}, {0, 2}, {0, 3}});
    auto mod = modulator_to_treedepth(star, 1, 1);
    REQUIRE(mod.has_value());
    CHECK(mod->vertices == std::vector<int>{0});
    CHECK(mod->forest.parent == std::vector<int>{-2, -1, -1, -1});

    CHECK(modulator_to_treedepth(complete(4), 1, 1) == std::nullopt);
    auto mod2 = modulator_to_treedepth(complete(4), 2, 2);
    REQUIRE(mod2.has_value());
    CHECK(mod2->vertices.size() == 2);

    // d large enough: empty modulator
    auto mod3 = modulator_to_treedepth(path(3), 2, 0);
    REQUIRE(mod3.has_value());
    CHECK(mod3->vertices.empty());
}

TEST_CASE("fat elimination trees") {
    // depth 1: a single bag holding everything
    auto t1 = fat_elimination_tree(path(3), 1, 3);
    REQUIRE(t1.has_value());
    CHECK(t1->size() == 1);
    CHECK(validate_fat_elimination_tree(path(3), *t1, 1, 3));
    CHECK(!fat_elimination_tree(path(3), 1, 2).has_value());

    CHECK(d_fold_vc_number(path(4), 1) == 4);
    CHECK(d_fold_vc_number(path(4), 2) == 2);
    CHECK(d_fold_vc_number(Graph(0, {}), 2) == 0);

    auto t2 = fat_elimination_tree(path(4), 2, 2);
    REQUIRE(t2.has_value());
    CHECK(validate_fat_elimination_tree(path(4), *t2, 2, 2));

    // disconnected graphs hang off a shared (possibly empty) root bag
    Graph two(4, {{0, 1}, {2, 3}});
    CHECK(!fat_elimination_tree(two, 2, 1).has_value());  // siblings can't carry an edge
    auto t3 = fat_elimination_tree(two, 3, 1);
    REQUIRE(t3.has_value());
    CHECK(validate_fat_elimination_tree(two, *t3, 3, 1));
    CHECK(t3->bags[0].empty());
}

TEST_CASE("fat tree inequalities on small graphs") {
    std::vector<Graph> gs{path(5), cycle(5), complete(4), Graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}})};
    for (const Graph& g : gs) {
        int td = treedepth_exact(g).first;
        for (int d = 1; d <= 3; ++d) {
            int vcd = d_fold_vc_number(g, d);
            CHECK(td <= d * vcd);
            // vc_d is at most the smallest modulator to treedepth d-1, except
            // that bags partition the vertices, so a nonempty graph always
            // needs width 1 even when the modulator is empty
            int modmin = g.n;
            for (int k = 0; k <= g.n; ++k)
                if (modulator_to_treedepth(g, d - 1, k)) {
                    modmin = k;
                    break;
                }
            CHECK(vcd <= std::max(1, modmin));
        }
    }
}

TEST_CASE("branch labeling on hand-built trees") {
    // balanced binary tree, four leaves
    RootedTree t = RootedTree::from_parents({-1, 0, 0, 1, 1, 2, 2});
    auto lab = tree_edge_labeling(t);
    CHECK(lab.labels.at({0, 1}) == "0");
    CHECK(lab.labels.at({0, 2}) == "1");
    CHECK(lab.labels.at({1, 3}) == "0");
    CHECK(lab.labels.at({1, 4}) == "1");
    CHECK(lab.labels.at({2, 5}) == "0");
    CHECK(lab.labels.at({2, 6}) == "1");
    CHECK(validate_edge_labeling(t, lab));

    // a path has one leaf: every label is empty
    RootedTree p = RootedTree::from_parents({-1, 0, 1});
    auto plab = tree_edge_labeling(p);
    CHECK(plab.labels.at({0, 1}).empty());
    CHECK(plab.labels.at({1, 2}).empty());
    CHECK(validate_edge_labeling(p, plab));

    // single node: no edges, trivially valid
    RootedTree s = RootedTree::from_parents({-1});
    CHECK(validate_edge_labeling(s, tree_edge_labeling(s)));
}

TEST_CASE("branch labeling properties on random trees") {
    Rng rng(0x5eed);
    for (int trial = 0; trial < 60; ++trial) {
        RootedTree t = random_tree(rng, 96, 64);
        auto lab = tree_edge_labeling(t);
        std::string why;
        CHECK_MESSAGE(validate_edge_labeling(t, lab, &why), why);

        // per-branch budget: total label length <= ceil(log2(#leaves))
        int leaves = int(t.leaves_preorder().size());
        int p = leaves <= 1 ? 0 : int(std::ceil(std::log2(leaves)));
        for (int v = 0; v < t.size(); ++v) {
            if (!t.children[v].empty()) continue;
            int total = 0;
            auto chain = t.ancestors(v);
            for (size_t j = 0; j + 1 < chain.size(); ++j)
                total += int(lab.labels.at({chain[j + 1], chain[j]}).size());
            CHECK(total <= p);
        }
    }
}

TEST_CASE("tree file format") {
    TreeFile t;
    t.parents = {-1, 0, 0};
    t.bags = std::vector<std::vector<int>>{{0, 1}, {2}, {}};
    t.labels = std::map<std::pair<int, int>, std::string>{{{0, 1}, "01"}, {{0, 2}, ""}};
    TreeFile back = parse_tree_file(write_tree_file(t));
    CHECK(back.parents == t.parents);
    CHECK(*back.bags == *t.bags);
    CHECK(*back.labels == *t.labels);

    CHECK_THROWS_WITH_AS(parse_tree_file("tree 2\nparents -1\n"), doctest::Contains("line 2"),
                         InputError);
    CHECK_THROWS_AS(parse_tree_file("tree 1\nparents -1\nlabel 0 1 2a\n"), InputError);
    CHECK_THROWS_AS(parse_tree_file(""), InputError);
}

TEST_CASE("rooted tree shape errors") {
    CHECK_THROWS_AS(RootedTree::from_parents({-1, -1}), InputError);  // two roots
    CHECK_THROWS_AS(RootedTree::from_parents({1, 0}), InputError);    // cycle
    CHECK_THROWS_AS(RootedTree::from_parents({5}), InputError);
}
