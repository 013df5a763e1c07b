#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csplab/cli.hpp"
#include "csplab/logic.hpp"
#include "csplab/rng.hpp"
#include "csplab/solvers.hpp"
#include "csplab/textio.hpp"
#include "doctest.h"

using namespace csplab;

namespace {

std::string tmp_path(const std::string& name) {
    std::filesystem::create_directories("cli_tmp");
    return (std::filesystem::path("cli_tmp") / name).string();
}

std::string stash(const std::string& name, const std::string& text) {
    std::string path = tmp_path(name);
    write_file(path, text);
    return path;
}

std::vector<int> smallest_cover(const Graph& g) {
    for (int k = 0;; ++k)
        if (auto w = vertex_cover_exact(g, k)) return *w;
}

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run_solve(const SolveOptions& o) {
    std::ostringstream so, se;
    int code = cmd_solve(o, so, se);
    return {code, so.str(), se.str()};
}

Run run_reduce(const ReduceOptions& o) {
    std::ostringstream so, se;
    int code = cmd_reduce(o, so, se);
    return {code, so.str(), se.str()};
}

Run run_verify(const CampaignConfig& cfg) {
    std::ostringstream so, se;
    int code = cmd_verify(cfg, so, se);
    return {code, so.str(), se.str()};
}

Run run_decompose(const DecomposeOptions& o) {
    std::ostringstream so, se;
    int code = cmd_decompose(o, so, se);
    return {code, so.str(), se.str()};
}

Run run_gen(const GenOptions& o) {
    std::ostringstream so, se;
    int code = cmd_gen(o, so, se);
    return {code, so.str(), se.str()};
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("vertex set files round trip") {
    std::string text = write_vertex_set({3, 1});
    CHECK(text == "set 2\nv 1\nv 3\n");
    CHECK(parse_vertex_set(text) == std::vector<int>{1, 3});
    CHECK(write_vertex_set(parse_vertex_set(text)) == text);
    CHECK(parse_vertex_set("set 0\n").empty());
    CHECK(parse_vertex_set("# cover\nset 1\nv 4\n") == std::vector<int>{4});

    CHECK_THROWS_AS(parse_vertex_set(""), InputError);
    CHECK_THROWS_AS(parse_vertex_set("junk 1\nv 0\n"), InputError);
    CHECK_THROWS_AS(parse_vertex_set("set 2\nv 0\n"), InputError);
    CHECK_THROWS_AS(parse_vertex_set("set 1\nv 0\nv 1\n"), InputError);
    CHECK_THROWS_AS(parse_vertex_set("set 1\nv -1\n"), InputError);
    CHECK_THROWS_AS(parse_vertex_set("set 2\nv 0\nv 0\n"), InputError);
    CHECK_THROWS_AS(parse_vertex_set("set 1\nw 0\n"), InputError);
    CHECK_THROWS_AS(parse_vertex_set("set\n"), InputError);
}

TEST_CASE("solve decides instances and explains failures") {
    BinCspInstance one;
    one.n = 1;
    one.domains = {{7}};
    std::string sat_path = stash("one.bcsp", write_bincsp(one));

    SolveOptions o;
    o.file = sat_path;
    o.witness = true;
    Run r = run_solve(o);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "SAT\n"));
    CHECK(contains(r.out, "witness 7\n"));
    CHECK(contains(r.out, "variables 1\n"));
    CHECK(contains(r.out, "constraints 0\n"));
    CHECK(contains(r.out, "domain_cells 1\n"));

    BinCspInstance hollow;
    hollow.n = 1;
    hollow.domains = {{}};
    SolveOptions u;
    u.file = stash("hollow.bcsp", write_bincsp(hollow));
    Run ru = run_solve(u);
    CHECK(ru.code == 1);
    CHECK(contains(ru.out, "UNSAT\n"));
    CHECK(!contains(ru.out, "witness"));

    SolveOptions missing;
    missing.file = tmp_path("absent.bcsp");
    CHECK(run_solve(missing).code == 2);
    SolveOptions bad;
    bad.file = stash("bad.bcsp", "gibberish\n");
    Run rb = run_solve(bad);
    CHECK(rb.code == 2);
    CHECK(contains(rb.err, "error:"));

    SolveOptions method = o;
    method.method = "magic";
    CHECK(run_solve(method).code == 2);
    SolveOptions dpless = o;
    dpless.method = "dp";
    CHECK(run_solve(dpless).code == 2);  // no --tree
}

TEST_CASE("solve methods agree across witnesses") {
    for (uint64_t trial = 0; trial < 20; ++trial) {
        Rng rng(trial_seed(70100, trial));
        int n = rng.range(1, 5);
        BinCspInstance inst = random_instance(n, rng.range(1, 3), 0.5, 0.6, rng.next());
        Graph g = inst.gaifman();
        std::string tag = std::to_string(trial);
        std::string inst_path = stash("m" + tag + ".bcsp", write_bincsp(inst));

        auto [td, forest] = treedepth_exact(g);
        (void)td;
        TreeFile tf;
        tf.parents = forest.parent;
        std::string tree_path = stash("m" + tag + ".tree", write_tree_file(tf));
        std::string cover_path = stash("m" + tag + ".set", write_vertex_set(smallest_cover(g)));

        Modulator mod = [&] {
            for (int k = 0;; ++k)
                if (auto m = modulator_to_treedepth(g, 2, k)) return *m;
        }();
        std::string mod_path = stash("m" + tag + "w.set", write_vertex_set(mod.vertices));
        TreeFile mtf;
        mtf.parents = mod.forest.parent;
        for (int& p : mtf.parents)
            if (p == -2) p = -1;
        std::string mtree_path = stash("m" + tag + "w.tree", write_tree_file(mtf));

        SolveOptions brute{inst_path, "brute", "", "", true};
        SolveOptions dp{inst_path, "dp", tree_path, "", true};
        SolveOptions vc{inst_path, "vc", "", cover_path, true};
        SolveOptions ms{inst_path, "modulator", mtree_path, mod_path, true};
        Run rb = run_solve(brute);
        Run rd = run_solve(dp);
        Run rv = run_solve(vc);
        Run rm = run_solve(ms);
        CHECK(rb.code != 2);
        CHECK(rd.code == rb.code);
        CHECK(rv.code == rb.code);
        CHECK(rm.code == rb.code);
        CHECK(rd.out == rb.out);
        CHECK(rv.out == rb.out);
        CHECK(rm.out == rb.out);
    }

    // rejected witnesses error out instead of guessing
    BinCspInstance edge;
    edge.n = 2;
    edge.domains = {{0, 1}, {0, 1}};
    edge.add_constraint(0, 1, {{0, 1}});
    std::string path = stash("edge.bcsp", write_bincsp(edge));
    TreeFile two_roots;
    two_roots.parents = {-1, -1};
    SolveOptions baddp{path, "dp", stash("edge.tree", write_tree_file(two_roots)), "", false};
    CHECK(run_solve(baddp).code == 2);
    SolveOptions badvc{path, "vc", "", stash("empty.set", write_vertex_set({})), false};
    CHECK(run_solve(badvc).code == 2);
}

TEST_CASE("reduce writes artifacts that re-parse and re-validate") {
    WeightedSatInstance w;
    w.formula = random_normalized_formula(3, 4, 3, 77, -1);
    w.k = 2;
    std::string in = stash("a.wsat", write_wsat(w));

    ReduceOptions ro;
    ro.rule = "w3hard";
    ro.inputs = {in};
    Run r = run_reduce(ro);
    CHECK(r.code == 0);
    std::string artifact = tmp_path("a.bcsp");
    CHECK(contains(r.out, "wrote " + artifact + "\n"));
    BinCspInstance back = parse_bincsp(read_file(artifact));
    back.validate();
    CHECK(solve_bruteforce(back).has_value() == weighted_sat_bruteforce(w).has_value());
    std::string report = read_file(artifact + ".report");
    CHECK(contains(report, "rule wsat3am_to_bincsp_vc"));
    CHECK(contains(report, "modulator"));
    CHECK(contains(report, "forest"));

    BinCspInstance inst = random_instance(4, 2, 0.6, 0.6, 123);
    std::string inst_path = stash("b.bcsp", write_bincsp(inst));
    std::vector<int> cover = smallest_cover(inst.gaifman());
    ReduceOptions vo;
    vo.rule = "vc-to-wsat3";
    vo.inputs = {inst_path};
    vo.cover = stash("b.set", write_vertex_set(cover));
    vo.out = tmp_path("custom.wsat");
    CHECK(run_reduce(vo).code == 0);
    WeightedSatInstance ws = parse_wsat(read_file(vo.out));
    CHECK(normalization_level(ws.formula) <= 3);
    CHECK(weighted_sat_bruteforce(ws).has_value() == solve_bruteforce(inst).has_value());

    BinCspInstance small = random_instance(3, 2, 0.6, 0.6, 9);
    auto [td, forest] = treedepth_exact(small.gaifman());
    (void)td;
    TreeFile tf;
    tf.parents = forest.parent;
    ReduceOptions so;
    so.rule = "td-structure";
    so.inputs = {stash("c.bcsp", write_bincsp(small))};
    so.tree = stash("c.tree", write_tree_file(tf));
    Run rs = run_reduce(so);
    CHECK(rs.code == 0);
    RelationalStructure a = parse_struct(read_file(tmp_path("c.struct")));
    a.validate();
    GuidedSentence g = parse_guided_fo(read_file(tmp_path("c.fo")));
    CHECK(eval_guided(a, g) == solve_bruteforce(small).has_value());
    CHECK(contains(read_file(tmp_path("c.struct.report")), "rule bincsp_td_to_structure"));

    ReduceOptions unknown;
    unknown.rule = "fold-laundry";
    unknown.inputs = {in};
    Run run = run_reduce(unknown);
    CHECK(run.code == 2);
    CHECK(contains(run.err, "unknown rule"));

    WeightedSatInstance plain;
    plain.formula = random_normalized_formula(3, 3, 3, 5, 1);  // monotone, not antimonotone
    plain.k = 1;
    ReduceOptions mono;
    mono.rule = "w3hard";
    mono.inputs = {stash("mono.wsat", write_wsat(plain))};
    CHECK(run_reduce(mono).code == 2);

    ReduceOptions coverless;
    coverless.rule = "vc-to-wsat3";
    coverless.inputs = {inst_path};
    CHECK(run_reduce(coverless).code == 2);
    ReduceOptions inputless;
    inputless.rule = "w3hard";
    CHECK(run_reduce(inputless).code == 2);
}

TEST_CASE("campaigns run clean and reproduce") {
    std::vector<std::string> rules = campaign_rules();
    CHECK(rules.size() == 16);
    for (const char* name :
         {"w3hard", "vc-to-wsat3", "w2d1hard", "modtd-to-wsat", "fvs-hard", "fvs-to-circuit",
          "lc-vc-to-wsat2", "lc-gadgets", "lc-to-precol", "precol-vc-kernel", "precol-strip",
          "td-machine", "regular-arosm", "td-structure", "dfold-prenex", "solver-cross"})
        CHECK(std::find(rules.begin(), rules.end(), name) != rules.end());

    CampaignConfig vacuous;
    vacuous.rule = "w3hard";
    vacuous.trials = 0;
    Run rv = run_verify(vacuous);
    CHECK(rv.code == 0);
    CHECK(contains(rv.out, "trials 0"));

    for (const std::string& rule : rules) {
        CampaignConfig cfg;
        cfg.rule = rule;
        cfg.trials = 6;
        cfg.seed = 90210;
        cfg.max_n = 4;
        cfg.max_dom = 3;
        Run r = run_verify(cfg);
        INFO("rule ", rule, " -> ", r.out, r.err);
        CHECK(r.code == 0);
        CHECK(contains(r.out, "mismatches 0"));
        CHECK(contains(r.out, "invalid 0"));
        CHECK(contains(r.out, "time_ms p50"));
    }

    CampaignConfig twice;
    twice.rule = "solver-cross";
    twice.trials = 8;
    twice.seed = 424242;
    twice.out_dir = tmp_path("campA");
    CampaignResult first = run_campaign(twice);
    twice.out_dir = tmp_path("campB");
    CampaignResult second = run_campaign(twice);
    CHECK(first.trials == second.trials);
    CHECK(first.mismatches == second.mismatches);
    CHECK(first.invalid == second.invalid);
    CHECK(first.skipped == second.skipped);
    std::string a = read_file(tmp_path("campA") + "/solver-cross.trials");
    std::string b = read_file(tmp_path("campB") + "/solver-cross.trials");
    CHECK(a == b);
    CHECK(contains(a, "campaign solver-cross trials 8 seed 424242\n"));
    CHECK(contains(a, "trial 0 "));

    CampaignConfig unknown;
    unknown.rule = "nope";
    unknown.trials = 1;
    CHECK_THROWS_AS(run_campaign(unknown), InputError);
    CHECK(run_verify(unknown).code == 2);
    CampaignConfig negative;
    negative.rule = "w3hard";
    negative.trials = -1;
    CHECK_THROWS_AS(negative.validate(), InputError);
    CampaignConfig capless;
    capless.rule = "w3hard";
    capless.max_n = 0;
    CHECK_THROWS_AS(capless.validate(), InputError);

    CampaignResult dirty;
    dirty.mismatches = 1;
    CHECK(!dirty.clean());
    dirty.mismatches = 0;
    dirty.invalid = 1;
    CHECK(!dirty.clean());

    CHECK(percentile({}, 50) == 0.0);
    CHECK(percentile({3.0, 1.0, 2.0}, 50) == 2.0);
    CHECK(percentile({3.0, 1.0, 2.0}, 100) == 3.0);
    CHECK(percentile({3.0, 1.0, 2.0}, 0) == 1.0);
}

TEST_CASE("decompose finds witnesses and reports nonexistence") {
    Graph p7(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}});
    std::string p7_path = stash("p7.graph", write_graph(p7));
    DecomposeOptions td;
    td.file = p7_path;
    td.parameter = "td";
    Run rt = run_decompose(td);
    CHECK(rt.code == 0);
    CHECK(contains(rt.out, "treedepth 3\n"));
    EliminationForest f{parse_tree_file(read_file(tmp_path("p7.tree"))).parents};
    CHECK(validate_elimination_forest(p7, f));
    CHECK(f.depth() == 3);

    Graph star6(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    DecomposeOptions dfold;
    dfold.file = stash("star6.graph", write_graph(star6));
    dfold.parameter = "dfold";
    dfold.d = 2;
    Run rd = run_decompose(dfold);
    CHECK(rd.code == 0);
    CHECK(contains(rd.out, "dfold_vc 1\n"));
    TreeFile witness = parse_tree_file(read_file(tmp_path("star6.tree")));
    REQUIRE(witness.bags.has_value());
    FatEliminationTree fat{witness.parents, *witness.bags};
    CHECK(validate_fat_elimination_tree(star6, fat, 2, 1));

    Graph lone_edge(2, {{0, 1}});
    DecomposeOptions vc0;
    vc0.file = stash("edge.graph", write_graph(lone_edge));
    vc0.parameter = "vc";
    vc0.k = 0;
    Run rv = run_decompose(vc0);
    CHECK(rv.code == 1);
    CHECK(contains(rv.out, "no vertex cover of size 0\n"));

    Graph triangle(3, {{0, 1}, {0, 2}, {1, 2}});
    DecomposeOptions fvs;
    fvs.file = stash("tri.graph", write_graph(triangle));
    fvs.parameter = "fvs";
    fvs.k = 1;
    Run rf = run_decompose(fvs);
    CHECK(rf.code == 0);
    CHECK(contains(rf.out, "feedback_vertex_set 1\n"));
    CHECK(parse_vertex_set(read_file(tmp_path("tri.set"))) == std::vector<int>{0});

    Graph c4(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    DecomposeOptions mod;
    mod.file = stash("c4.graph", write_graph(c4));
    mod.parameter = "mod-td";
    mod.d = 1;
    mod.k = 2;
    Run rm = run_decompose(mod);
    CHECK(rm.code == 0);
    CHECK(contains(rm.out, "modulator 2\n"));
    CHECK(parse_vertex_set(read_file(tmp_path("c4.set"))).size() == 2);
    CHECK(parse_tree_file(read_file(tmp_path("c4.tree"))).parents.size() == 4);

    DecomposeOptions fat0;
    fat0.file = tmp_path("tri.graph");
    fat0.parameter = "fat-tree";
    fat0.d = 2;
    fat0.k = 0;
    Run rz = run_decompose(fat0);
    CHECK(rz.code == 1);
    CHECK(contains(rz.out, "no fat elimination tree"));
    fat0.k = 3;
    CHECK(run_decompose(fat0).code == 0);

    // gaifman fallback for instance files
    BinCspInstance inst = random_instance(4, 2, 0.7, 0.6, 31);
    DecomposeOptions via_inst;
    via_inst.file = stash("inst.bcsp", write_bincsp(inst));
    via_inst.parameter = "td";
    CHECK(run_decompose(via_inst).code == 0);

    DecomposeOptions big;
    big.file = stash("big.graph", write_graph(Graph(25, {})));
    big.parameter = "td";
    CHECK(run_decompose(big).code == 2);  // exact solver cap
    DecomposeOptions unknown;
    unknown.file = p7_path;
    unknown.parameter = "girth";
    CHECK(run_decompose(unknown).code == 2);
    DecomposeOptions kless;
    kless.file = p7_path;
    kless.parameter = "vc";
    CHECK(run_decompose(kless).code == 2);
}

TEST_CASE("generated artifacts are seeded and reusable") {
    GenOptions g1;
    g1.kind = "bincsp";
    g1.seed = 5;
    g1.out = tmp_path("g1.bcsp");
    CHECK(run_gen(g1).code == 0);
    GenOptions g2 = g1;
    g2.out = tmp_path("g2.bcsp");
    CHECK(run_gen(g2).code == 0);
    CHECK(read_file(g1.out) == read_file(g2.out));
    BinCspInstance inst = parse_bincsp(read_file(g1.out));
    inst.validate();

    GenOptions to_stdout = g1;
    to_stdout.out.clear();
    Run rs = run_gen(to_stdout);
    CHECK(rs.code == 0);
    CHECK(rs.out == read_file(g1.out));

    std::set<std::string> distinct;
    for (uint64_t seed = 0; seed < 8; ++seed) {
        GenOptions gs;
        gs.seed = seed;
        distinct.insert(run_gen(gs).out);
    }
    CHECK(distinct.size() >= 2);

    GenOptions gw;
    gw.kind = "wsat";
    gw.seed = 11;
    Run rw = run_gen(gw);
    CHECK(rw.code == 0);
    WeightedSatInstance w = parse_wsat(rw.out);
    CHECK(normalization_level(w.formula) <= 3);
    CHECK(is_antimonotone(w.formula));

    GenOptions gg;
    gg.kind = "graph";
    gg.seed = 12;
    CHECK(parse_graph(run_gen(gg).out).n >= 1);
    GenOptions gl;
    gl.kind = "listcoloring";
    gl.seed = 13;
    parse_listcoloring(run_gen(gl).out).validate();

    GenOptions bad;
    bad.kind = "sonnet";
    CHECK(run_gen(bad).code == 2);
    GenOptions capless;
    capless.max_n = 0;
    CHECK(run_gen(capless).code == 2);
}

TEST_CASE("bundled machines compile and decide alike") {
    std::vector<RegularToy> toys = bundled_regular_toys();
    REQUIRE(toys.size() == 5);
    std::set<std::string> names;
    int accepts = 0;
    for (const RegularToy& toy : toys) {
        names.insert(toy.name);
        toy.machine.validate();
        toy.tree.validate();
        CHECK(toy.machine.kind.size() <= 6);
        CHECK(toy.budgets.alternation_k <= 2);
        RegularReduction red =
            compile_regular_arosm_to_bincsp(toy.machine, toy.tree, {}, toy.budgets);
        CHECK(validate_elimination_forest(red.instance.gaifman(), red.forest));
        bool csp = solve_by_elimination_forest(red.instance, red.forest).has_value();
        bool dec = decide(toy.machine, {}, toy.limits).accept;
        CHECK(csp == dec);
        accepts += dec ? 1 : 0;
    }
    CHECK(names.size() == toys.size());
    CHECK(accepts >= 1);
    CHECK(accepts < int(toys.size()));
}
