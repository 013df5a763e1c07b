#include "csplab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csplab/logic.hpp"
#include "csplab/rng.hpp"
#include "csplab/solvers.hpp"
#include "csplab/textio.hpp"

namespace csplab {

namespace {

std::vector<int> smallest_cover(const Graph& g) {
    for (int k = 0;; ++k)
        if (auto w = vertex_cover_exact(g, k)) return *w;
}

std::vector<int> smallest_fvs(const Graph& g) {
    for (int k = 0;; ++k)
        if (auto w = feedback_vertex_set_exact(g, k)) return *w;
}

Modulator smallest_modulator(const Graph& g, int d) {
    for (int k = 0;; ++k)
        if (auto m = modulator_to_treedepth(g, d, k)) return *m;
}

bool cover_ok(const Graph& g, const std::vector<int>& w) {
    std::set<int> ws(w.begin(), w.end());
    for (auto [u, v] : g.edges)
        if (!ws.count(u) && !ws.count(v)) return false;
    return true;
}

Graph remainder_graph(const Graph& g, const std::vector<int>& w) {
    std::set<int> ws(w.begin(), w.end());
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges)
        if (!ws.count(u) && !ws.count(v)) edges.emplace_back(u, v);
    return Graph(g.n, std::move(edges));
}

// Checks a parent array with -2 exactly on w: chains outside w must be
// acyclic, every w-free edge ancestral, and no chain longer than maxdepth
// (maxdepth < 0 lifts the depth bound).
bool remainder_forest_ok(const Graph& g, const std::vector<int>& w,
                         const std::vector<int>& forest, int maxdepth) {
    if (int(forest.size()) != g.n) return false;
    std::set<int> ws(w.begin(), w.end());
    std::vector<std::vector<int>> chain(size_t(g.n));
    for (int v = 0; v < g.n; ++v) {
        if (ws.count(v)) {
            if (forest[size_t(v)] != -2) return false;
            continue;
        }
        int cur = v;
        while (cur >= 0) {
            chain[size_t(v)].push_back(cur);
            if (chain[size_t(v)].size() > forest.size()) return false;
            if (cur >= g.n) return false;
            cur = forest[size_t(cur)];
            if (cur == -2) return false;
        }
        if (maxdepth >= 0 && int(chain[size_t(v)].size()) > maxdepth) return false;
    }
    for (auto [u, v] : g.edges) {
        if (ws.count(u) || ws.count(v)) continue;
        const auto& cu = chain[size_t(u)];
        const auto& cv = chain[size_t(v)];
        if (std::find(cu.begin(), cu.end(), v) == cu.end() &&
            std::find(cv.begin(), cv.end(), u) == cv.end())
            return false;
    }
    return true;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

Graph random_graph(Rng& rng, int n, double p) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.chance(p)) edges.emplace_back(u, v);
    return Graph(n, std::move(edges));
}

// graph whose edges all touch 0..k-1, color lists over 0..m-1
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

ListColoringInstance random_listcoloring(Rng& rng, int n, int m) {
    ListColoringInstance lc;
    lc.graph = random_graph(rng, n, 0.5);
    for (int c = 0; c < m; ++c) lc.colors.push_back(c);
    lc.lists.assign(size_t(n), {});
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < m; ++c)
            if (rng.chance(0.7)) lc.lists[size_t(v)].push_back(c);
    return lc;
}

PrecoloringInstance random_precoloring(Rng& rng, const Graph& g, int m, double color_prob) {
    PrecoloringInstance pre;
    pre.graph = g;
    for (int c = 0; c < m; ++c) pre.colors.push_back(c);
    for (int v = 0; v < g.n; ++v)
        if (rng.chance(color_prob)) pre.precolor[v] = int(rng.below(uint64_t(m)));
    return pre;
}

bool lc_sat(const ListColoringInstance& lc) {
    return solve_bruteforce(listcoloring_to_bincsp(lc)).has_value();
}

ListColoringInstance precolor_lists(const PrecoloringInstance& pre) {
    ListColoringInstance lc;
    lc.graph = pre.graph;
    lc.colors = pre.colors;
    lc.lists.assign(size_t(pre.graph.n), pre.colors);
    for (auto [v, c] : pre.precolor) lc.lists[size_t(v)] = {c};
    return lc;
}

bool pre_sat(const PrecoloringInstance& pre) { return lc_sat(precolor_lists(pre)); }

bool usage_within(const ResourceUsage& u, const ResourceLimits& l) {
    return u.working_space <= l.working_space && u.stack_bits <= l.stack_bits &&
           u.nondeterminism <= l.nondeterminism && u.conondeterminism <= l.conondeterminism &&
           u.alternation <= l.alternation;
}

struct TrialReport {
    std::string status;  // sat | unsat | mismatch | invalid | skip
};

TrialReport check(bool direct, bool via, bool witness_ok) {
    if (!witness_ok) return {"invalid"};
    if (direct != via) return {"mismatch"};
    return {direct ? "sat" : "unsat"};
}

using TrialFn = std::function<TrialReport(const CampaignConfig&, uint64_t)>;

// Every trial body draws one input from its seed, runs the reduction under
// test, checks the declared witnesses, and compares two independent
// decision procedures. Bodies that need a structural witness redraw a
// bounded number of times before reporting a skip.
const std::map<std::string, TrialFn>& rule_table() {
    static const std::map<std::string, TrialFn> table = [] {
        std::map<std::string, TrialFn> t;

        t["w3hard"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            NormalizedFormula f =
                random_normalized_formula(3, rng.range(1, cfg.max_n), 4, rng.next(), -1);
            int k = rng.range(0, cfg.k);
            WeightedSatInstance w;
            w.formula = f;
            w.k = k;
            bool direct = weighted_sat_bruteforce(w).has_value();
            BinCspWithModulator red = wsat3am_to_bincsp_vc(f, k);
            bool ok = int(red.modulator.size()) <= k &&
                      cover_ok(red.instance.gaifman(), red.modulator);
            bool via = solve_bruteforce(red.instance).has_value();
            return check(direct, via, ok);
        };

        t["vc-to-wsat3"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            BinCspInstance inst = random_instance(rng.range(1, cfg.max_n),
                                                  rng.range(1, cfg.max_dom), 0.5, 0.6, rng.next());
            bool direct = solve_bruteforce(inst).has_value();
            std::vector<int> cover = smallest_cover(inst.gaifman());
            WeightedSatInstance w = bincsp_vc_to_wsat3(inst, cover);
            bool ok = normalization_level(w.formula) <= 3 && w.k == int(cover.size());
            bool via = weighted_sat_bruteforce(w).has_value();
            return check(direct, via, ok);
        };

        t["w2d1hard"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            NormalizedFormula f = random_normalized_formula(2 * cfg.d + 1,
                                                            rng.range(1, cfg.max_n), 3,
                                                            rng.next(), -1);
            int k = rng.range(0, cfg.k);
            WeightedSatInstance w;
            w.formula = f;
            w.k = k;
            bool direct = weighted_sat_bruteforce(w).has_value();
            BinCspWithModulator red = wsat2d1am_to_bincsp_forest_modulator(f, k, cfg.d);
            bool ok = int(red.modulator.size()) <= k &&
                      normalization_level(f) == 2 * cfg.d + 1 &&
                      remainder_forest_ok(red.instance.gaifman(), red.modulator, red.forest,
                                          cfg.d);
            bool via = solve_by_modulator(red.instance, red.modulator,
                                          EliminationForest{red.forest})
                           .has_value();
            return check(direct, via, ok);
        };

        t["modtd-to-wsat"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            for (int attempt = 0; attempt < 40; ++attempt) {
                BinCspInstance inst =
                    random_instance(rng.range(1, cfg.max_n), rng.range(1, cfg.max_dom), 0.5,
                                    0.6, rng.next());
                auto mod = modulator_to_treedepth(inst.gaifman(), cfg.d, cfg.k);
                if (!mod) continue;
                WeightedSatInstance w =
                    bincsp_modtd_to_wsat2d1(inst, mod->vertices, mod->forest.parent);
                bool ok = normalization_level(w.formula) <= 2 * cfg.d + 1 &&
                          w.k == int(mod->vertices.size());
                bool direct = solve_bruteforce(inst).has_value();
                bool via = weighted_sat_bruteforce(w).has_value();
                return check(direct, via, ok);
            }
            return TrialReport{"skip"};
        };

        t["fvs-hard"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            NormalizedFormula f = random_normalized_formula(2 * cfg.d + 1,
                                                            rng.range(1, cfg.max_n), 3,
                                                            rng.next(), -1);
            int k = rng.range(0, cfg.k);
            WeightedSatInstance w;
            w.formula = f;
            w.k = k;
            bool direct = weighted_sat_bruteforce(w).has_value();
            BinCspWithModulator red = wsatam_to_bincsp_fvs(f, k);
            Graph g = red.instance.gaifman();
            bool ok = int(red.modulator.size()) <= k &&
                      remainder_graph(g, red.modulator).is_acyclic() &&
                      remainder_forest_ok(g, red.modulator, red.forest, -1);
            bool via = solve_by_modulator(red.instance, red.modulator,
                                          EliminationForest{red.forest})
                           .has_value();
            return check(direct, via, ok);
        };

        t["fvs-to-circuit"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            BinCspInstance inst = random_instance(rng.range(1, cfg.max_n),
                                                  rng.range(1, cfg.max_dom), 0.5, 0.5,
                                                  rng.next());
            bool direct = solve_bruteforce(inst).has_value();
            std::vector<int> fvs = smallest_fvs(inst.gaifman());
            CircuitWithBudget c = bincsp_fvs_to_circuit(inst, fvs);
            bool ok = c.k == int(fvs.size());
            try {
                c.circuit.validate();
            } catch (const InputError&) {
                ok = false;
            }
            bool via = weighted_circuit_sat_bruteforce(c.circuit, c.k).has_value();
            return check(direct, via, ok);
        };

        t["lc-vc-to-wsat2"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            for (int attempt = 0; attempt < 40; ++attempt) {
                int k = rng.range(1, 2);
                int m = rng.range(1, std::min(cfg.max_dom, 4));
                int n = std::min(cfg.max_n, k + 1 + int(rng.below(4)));
                if (n <= k) n = k + 1;
                ListColoringInstance lc = random_covered_listcol(rng.next(), n, k, m);
                std::vector<int> cover;
                for (int v = 0; v < k; ++v) cover.push_back(v);
                WeightedSatInstance w = listcoloring_vc_to_wsat2(lc, cover);
                if (binom(w.formula.num_vars, w.k) > 150000) continue;
                auto adj = lc.graph.adjacency();
                std::set<std::vector<int>> classes;
                for (int v = k; v < n; ++v) classes.insert(adj[size_t(v)]);
                int expect = k;
                for (const auto& nb : classes) expect += 4 * int(nb.size());
                bool ok = w.k == expect && normalization_level(w.formula) <= 2;
                bool direct = lc_sat(lc);
                bool via = weighted_sat_bruteforce(w).has_value();
                return check(direct, via, ok);
            }
            return TrialReport{"skip"};
        };

        t["lc-gadgets"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            BinCspInstance inst = random_instance(rng.range(1, cfg.max_n),
                                                  rng.range(1, cfg.max_dom), 0.5, 0.6,
                                                  rng.next());
            TaggedListColoring tagged = bincsp_to_listcoloring(inst);
            bool ok = tagged.lc.graph.n == inst.n + tagged.gadget_vertices;
            try {
                tagged.lc.validate();
            } catch (const InputError&) {
                ok = false;
            }
            bool direct = solve_bruteforce(inst).has_value();
            bool via = lc_sat(tagged.lc);
            return check(direct, via, ok);
        };

        t["lc-to-precol"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            ListColoringInstance lc =
                random_listcoloring(rng, rng.range(1, cfg.max_n), rng.range(1, cfg.max_dom));
            Modulator mod = smallest_modulator(lc.graph, cfg.d);
            PrecoloringWithModulator red =
                listcoloring_to_precolext(lc, mod.vertices, mod.forest.parent);
            bool ok = remainder_forest_ok(red.instance.graph, red.modulator, red.forest,
                                          cfg.d + 1);
            bool direct = lc_sat(lc);
            bool via = pre_sat(red.instance);
            return check(direct, via, ok);
        };

        t["precol-vc-kernel"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            Graph g = random_graph(rng, rng.range(1, cfg.max_n), 0.5);
            PrecoloringInstance pre =
                random_precoloring(rng, g, rng.range(1, cfg.max_dom), 0.4);
            std::vector<int> cover = smallest_cover(g);
            KernelResult kr = precolext_vc_kernel(pre, cover);
            bool ok = kr.decided || kr.kernel.graph.n <= int(cover.size());
            bool direct = pre_sat(pre);
            bool via = kr.decided ? kr.satisfiable : lc_sat(kr.kernel);
            return check(direct, via, ok);
        };

        t["precol-strip"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            Graph g = random_graph(rng, rng.range(1, cfg.max_n), 0.5);
            PrecoloringInstance pre =
                random_precoloring(rng, g, rng.range(1, cfg.max_dom), 0.4);
            Modulator mod = smallest_modulator(g, cfg.d);
            StripResult sr = precolext_modtd_strip(pre, mod.vertices, mod.forest.parent);
            bool ok = sr.decided ||
                      remainder_forest_ok(sr.instance.graph, sr.modulator, sr.forest,
                                          cfg.d - 1);
            bool direct = pre_sat(pre);
            bool via = sr.decided ? sr.satisfiable : lc_sat(sr.instance);
            return check(direct, via, ok);
        };

        t["td-machine"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            for (int attempt = 0; attempt < 40; ++attempt) {
                BinCspInstance inst =
                    random_instance(rng.range(1, cfg.max_n), rng.range(1, cfg.max_dom), 0.55,
                                    0.55, rng.next());
                auto [td, forest] = treedepth_exact(inst.gaifman());
                if (td > cfg.d) continue;
                CompiledMachine c = compile_bincsp_td(inst, forest);
                DecideResult r = decide(c.machine, c.input, c.limits, 20'000'000);
                bool ok = true;
                if (r.accept)
                    ok = usage_within(r.usage, c.limits) &&
                         r.usage.alternation <= 2 * forest.depth() + 3;
                bool direct = solve_bruteforce(inst).has_value();
                return check(direct, r.accept, ok);
            }
            return TrialReport{"skip"};
        };

        t["regular-arosm"] = [](const CampaignConfig&, uint64_t seed) {
            std::vector<RegularToy> toys = bundled_regular_toys();
            const RegularToy& toy = toys[size_t(seed % toys.size())];
            RegularReduction red =
                compile_regular_arosm_to_bincsp(toy.machine, toy.tree, {}, toy.budgets);
            int K = toy.budgets.alternation_k;
            bool ok = red.forest.depth() <= 3 * K * K + K &&
                      validate_elimination_forest(red.instance.gaifman(), red.forest);
            bool via = solve_by_elimination_forest(red.instance, red.forest).has_value();
            bool direct = decide(toy.machine, {}, toy.limits).accept;
            return check(direct, via, ok);
        };

        t["td-structure"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            for (int attempt = 0; attempt < 40; ++attempt) {
                BinCspInstance inst =
                    random_instance(rng.range(1, cfg.max_n), rng.range(1, cfg.max_dom), 0.55,
                                    0.55, rng.next());
                auto [td, forest] = treedepth_exact(inst.gaifman());
                if (td > cfg.d) continue;
                GuidedEncoding enc = bincsp_td_to_structure(inst, forest);
                bool ok = true;
                try {
                    enc.structure.validate();
                    enc.sentence.validate();
                } catch (const InputError&) {
                    ok = false;
                }
                bool direct = solve_bruteforce(inst).has_value();
                bool via = eval_guided(enc.structure, enc.sentence);
                return check(direct, via, ok);
            }
            return TrialReport{"skip"};
        };

        t["dfold-prenex"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            for (int attempt = 0; attempt < 40; ++attempt) {
                BinCspInstance inst =
                    random_instance(rng.range(1, cfg.max_n), rng.range(1, cfg.max_dom), 0.5,
                                    0.55, rng.next());
                int d = rng.range(1, cfg.d);
                int k = rng.range(1, cfg.k);
                auto w = fat_elimination_tree(inst.gaifman(), d, k);
                if (!w) continue;
                PrenexEncoding enc = bincsp_dfold_to_prenex(inst, *w);
                bool ok = is_sigma_shape(enc.sentence, 2 * w->depth() - 1);
                try {
                    enc.structure.validate();
                    enc.sentence.validate();
                } catch (const InputError&) {
                    ok = false;
                }
                bool direct = solve_bruteforce(inst).has_value();
                bool via = eval_prenex(enc.structure, enc.sentence);
                return check(direct, via, ok);
            }
            return TrialReport{"skip"};
        };

        t["solver-cross"] = [](const CampaignConfig& cfg, uint64_t seed) {
            Rng rng(seed);
            BinCspInstance inst = random_instance(rng.range(1, cfg.max_n),
                                                  rng.range(1, cfg.max_dom), 0.5, 0.6,
                                                  rng.next());
            Graph g = inst.gaifman();
            auto brute = solve_bruteforce(inst);
            auto [td, forest] = treedepth_exact(g);
            (void)td;
            auto dp = solve_by_elimination_forest(inst, forest);
            auto vc = solve_by_vertex_cover(inst, smallest_cover(g));
            Modulator mod = smallest_modulator(g, cfg.d);
            auto ms = solve_by_modulator(inst, mod.vertices, mod.forest);
            if (!(brute == dp && brute == vc && brute == ms)) return TrialReport{"mismatch"};
            return TrialReport{brute ? "sat" : "unsat"};
        };

        return t;
    }();
    return table;
}

std::string with_ext(const std::string& path, const std::string& ext) {
    std::filesystem::path p(path);
    p.replace_extension(ext);
    return p.string();
}

std::string report_text(const ReductionReport& r, const std::vector<std::string>& extra) {
    std::ostringstream o;
    o << "rule " << r.rule << "\n";
    o << "parameter " << r.parameter << " " << r.parameter_value << "\n";
    for (const std::string& n : r.notes) o << "note " << n << "\n";
    for (const std::string& e : extra) o << e << "\n";
    return o.str();
}

std::string join_ints(const std::string& head, const std::vector<int>& v) {
    std::ostringstream o;
    o << head;
    for (int x : v) o << " " << x;
    return o.str();
}

// parents with the modulator entries overwritten by the -2 marker
std::vector<int> mark_modulator(std::vector<int> parents, const std::vector<int>& w, int n) {
    if (int(parents.size()) != n)
        throw InputError("witness tree has " + std::to_string(parents.size()) +
                         " entries, instance has " + std::to_string(n));
    for (int v : w) {
        if (v < 0 || v >= n) throw InputError("modulator vertex out of range");
        parents[size_t(v)] = -2;
    }
    return parents;
}

Graph load_graph(const std::string& file) {
    std::string text = read_file(file);
    std::string ext = std::filesystem::path(file).extension().string();
    if (ext == ".graph") return parse_graph(text);
    if (ext == ".lc") return parse_listcoloring(text).graph;
    if (ext == ".pre") return parse_precoloring(text).graph;
    return parse_bincsp(text).gaifman();
}

} // namespace

std::vector<int> parse_vertex_set(const std::string& text) {
    auto lines = tokenize_text(text);
    if (lines.empty()) throw InputError("empty vertex set file");
    const Line& head = lines[0];
    if (head.tok(0, "header") != "set") head.fail("expected 'set <count>'");
    int count = head.num(1, "set size");
    if (count < 0) head.fail("negative set size");
    std::vector<int> vs;
    std::set<int> seen;
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tokens[0] != "v") l.fail("unknown directive '" + l.tokens[0] + "'");
        int v = l.num(1, "vertex");
        if (v < 0) l.fail("negative vertex");
        if (!seen.insert(v).second) l.fail("duplicate vertex " + std::to_string(v));
        vs.push_back(v);
    }
    if (int(vs.size()) != count)
        throw InputError("set header declares " + std::to_string(count) + " vertices, file has " +
                         std::to_string(vs.size()));
    std::sort(vs.begin(), vs.end());
    return vs;
}

std::string write_vertex_set(const std::vector<int>& vertices) {
    std::vector<int> vs = vertices;
    std::sort(vs.begin(), vs.end());
    std::ostringstream o;
    o << "set " << vs.size() << "\n";
    for (int v : vs) o << "v " << v << "\n";
    return o.str();
}

std::vector<RegularToy> bundled_regular_toys() {
    auto star = [](int leaves) {
        OrderedTree t;
        t.add_child(-1);
        for (int i = 0; i < leaves; ++i) t.add_child(0);
        return t;
    };
    auto budgets = [](long a, long b, long sb, int k) {
        RegularBudgets r;
        r.nondeterminism = a;
        r.conondeterminism = b;
        r.stack_bits = sb;
        r.alternation_k = k;
        return r;
    };
    std::vector<RegularToy> toys;
    {
        // push one 1, read it back: a single accepting snapshot
        RegularToy t;
        t.name = "push-read";
        t.machine.add_state(StateKind::deterministic);
        t.machine.add_state(StateKind::deterministic);
        t.machine.final_state = t.machine.add_state(StateKind::deterministic);
        t.machine.delta[0] = {{1, 1, ""}};
        t.machine.delta[1] = {{2, -1, "tape1"}};
        t.tree = star(0);
        t.budgets = budgets(1, 1, 1, 1);
        t.limits = {8, 1, 1, 1, 1};
        toys.push_back(std::move(t));
    }
    {
        // read stack bit 1 of an empty stack: rejecting
        RegularToy t;
        t.name = "empty-read";
        t.machine.add_state(StateKind::deterministic);
        t.machine.final_state = t.machine.add_state(StateKind::deterministic);
        t.machine.delta[0] = {{1, -1, "tape1"}};
        t.tree = star(0);
        t.budgets = budgets(1, 1, 1, 1);
        t.limits = {8, 1, 1, 1, 1};
        toys.push_back(std::move(t));
    }
    {
        // universal fork into two existential tails, both reading the pushed 1
        RegularToy t;
        t.name = "two-tail";
        t.machine.add_state(StateKind::universal);
        t.machine.add_state(StateKind::existential);
        t.machine.add_state(StateKind::existential);
        t.machine.add_state(StateKind::deterministic);
        t.machine.final_state = t.machine.add_state(StateKind::deterministic);
        t.machine.delta[0] = {{1, 1, ""}, {2, 1, ""}};
        t.machine.delta[1] = {{3, -1, ""}, {3, -1, ""}};
        t.machine.delta[2] = {{3, -1, ""}, {3, -1, ""}};
        t.machine.delta[3] = {{4, -1, "tape1"}};
        t.tree = star(2);
        t.budgets = budgets(1, 1, 2, 2);
        t.limits = {8, 2, 1, 1, 2};
        toys.push_back(std::move(t));
    }
    {
        // same fork, second tail buries the read position under a 0
        RegularToy t;
        t.name = "two-tail-buried";
        t.machine.add_state(StateKind::universal);
        t.machine.add_state(StateKind::existential);
        t.machine.add_state(StateKind::existential);
        t.machine.add_state(StateKind::deterministic);
        t.machine.final_state = t.machine.add_state(StateKind::deterministic);
        int bad = t.machine.add_state(StateKind::deterministic);
        t.machine.delta[0] = {{1, 1, ""}, {2, 1, ""}};
        t.machine.delta[1] = {{3, -1, ""}, {3, -1, ""}};
        t.machine.delta[2] = {{bad, 0, ""}, {bad, 0, ""}};
        t.machine.delta[3] = {{4, -1, "tape1"}};
        t.machine.delta[size_t(bad)] = {{4, -1, "tape2"}};
        t.tree = star(2);
        t.budgets = budgets(1, 1, 2, 2);
        t.limits = {8, 2, 1, 1, 2};
        toys.push_back(std::move(t));
    }
    {
        // two universal levels in one block, four existential tails
        RegularToy t;
        t.name = "four-leaf";
        t.machine.add_state(StateKind::universal);
        t.machine.add_state(StateKind::universal);
        t.machine.add_state(StateKind::existential);
        t.machine.add_state(StateKind::deterministic);
        t.machine.final_state = t.machine.add_state(StateKind::deterministic);
        t.machine.delta[0] = {{1, 1, ""}, {1, 1, ""}};
        t.machine.delta[1] = {{2, -1, ""}, {2, -1, ""}};
        t.machine.delta[2] = {{3, -1, ""}, {3, -1, ""}};
        t.machine.delta[3] = {{4, -1, "tape1"}};
        t.tree = star(4);
        t.budgets = budgets(1, 2, 1, 2);
        t.limits = {8, 1, 1, 2, 2};
        toys.push_back(std::move(t));
    }
    return toys;
}

void CampaignConfig::validate() const {
    if (trials < 0) throw InputError("trial count must be nonnegative");
    if (max_n < 1) throw InputError("max-n must be positive");
    if (max_dom < 1) throw InputError("max-dom must be positive");
    if (d < 1) throw InputError("depth cap must be positive");
    if (k < 0) throw InputError("witness size cap must be nonnegative");
    if (!rule_table().count(rule)) throw InputError("unknown rule: " + rule);
}

std::vector<std::string> campaign_rules() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : rule_table()) names.push_back(name);
    return names;
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
    cfg.validate();
    const TrialFn& fn = rule_table().at(cfg.rule);
    CampaignResult res;
    res.trials = cfg.trials;
    std::vector<std::string> status(size_t(cfg.trials));
    for (int i = 0; i < cfg.trials; ++i) {
        uint64_t seed = trial_seed(cfg.seed, uint64_t(i));
        auto start = std::chrono::steady_clock::now();
        TrialReport rep;
        try {
            rep = fn(cfg, seed);
        } catch (const ResourceError&) {
            rep.status = "skip";
        }
        auto stop = std::chrono::steady_clock::now();
        res.millis.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        if (rep.status == "mismatch")
            ++res.mismatches;
        else if (rep.status == "invalid")
            ++res.invalid;
        else if (rep.status == "skip")
            ++res.skipped;
        status[size_t(i)] = rep.status;
    }
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ostringstream o;
        o << "campaign " << cfg.rule << " trials " << cfg.trials << " seed " << cfg.seed
          << "\n";
        for (int i = 0; i < cfg.trials; ++i) o << "trial " << i << " " << status[size_t(i)] << "\n";
        write_file((std::filesystem::path(cfg.out_dir) / (cfg.rule + ".trials")).string(),
                   o.str());
    }
    return res;
}

double percentile(std::vector<double> sample, double p) {
    if (sample.empty()) return 0.0;
    std::sort(sample.begin(), sample.end());
    double rank = std::ceil(p / 100.0 * double(sample.size()));
    size_t idx = rank < 1 ? 0 : size_t(rank) - 1;
    if (idx >= sample.size()) idx = sample.size() - 1;
    return sample[idx];
}

int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
    try {
        BinCspInstance inst = parse_bincsp(read_file(o.file));
        inst.validate();
        std::optional<std::vector<int>> sol;
        if (o.method == "brute") {
            sol = solve_bruteforce(inst);
        } else if (o.method == "dp") {
            if (o.tree.empty()) throw InputError("method dp needs --tree");
            EliminationForest f{parse_tree_file(read_file(o.tree)).parents};
            std::string why;
            if (!validate_elimination_forest(inst.gaifman(), f, &why))
                throw InputError("tree rejected: " + why);
            sol = solve_by_elimination_forest(inst, f);
        } else if (o.method == "vc") {
            if (o.cover.empty()) throw InputError("method vc needs --cover");
            std::vector<int> cover = parse_vertex_set(read_file(o.cover));
            for (int v : cover)
                if (v >= inst.n) throw InputError("cover vertex out of range");
            if (!cover_ok(inst.gaifman(), cover))
                throw InputError("cover rejected: uncovered constraint");
            sol = solve_by_vertex_cover(inst, cover);
        } else if (o.method == "modulator") {
            if (o.cover.empty() || o.tree.empty())
                throw InputError("method modulator needs --cover and --tree");
            std::vector<int> w = parse_vertex_set(read_file(o.cover));
            std::vector<int> parents =
                mark_modulator(parse_tree_file(read_file(o.tree)).parents, w, inst.n);
            if (!remainder_forest_ok(inst.gaifman(), w, parents, -1))
                throw InputError("modulator witness rejected");
            sol = solve_by_modulator(inst, w, EliminationForest{parents});
        } else {
            throw InputError("unknown method: " + o.method);
        }
        out << (sol ? "SAT" : "UNSAT") << "\n";
        if (sol && o.witness) {
            out << "witness";
            for (int v : *sol) out << " " << v;
            out << "\n";
        }
        long cells = 0;
        for (const auto& dom : inst.domains) cells += long(dom.size());
        out << "variables " << inst.n << "\n";
        out << "constraints " << inst.constraints.size() << "\n";
        out << "domain_cells " << cells << "\n";
        return sol ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_reduce(const ReduceOptions& o, std::ostream& out, std::ostream& err) {
    try {
        if (o.inputs.empty()) throw InputError("reduce needs an input file");
        const std::string& in0 = o.inputs[0];
        auto out_path = [&](const std::string& ext) {
            return o.out.empty() ? with_ext(in0, ext) : o.out;
        };
        auto emit = [&](const std::string& path, const std::string& content,
                        const ReductionReport& rep, const std::vector<std::string>& extra) {
            write_file(path, content);
            write_file(path + ".report", report_text(rep, extra));
            out << "wrote " << path << "\n";
            out << "wrote " << path << ".report\n";
        };
        auto need_cover = [&]() {
            if (o.cover.empty()) throw InputError("rule " + o.rule + " needs --cover");
            return parse_vertex_set(read_file(o.cover));
        };
        auto need_tree = [&]() {
            if (o.tree.empty()) throw InputError("rule " + o.rule + " needs --tree");
            return parse_tree_file(read_file(o.tree));
        };

        if (o.rule == "w3hard") {
            WeightedSatInstance w = parse_wsat(read_file(in0));
            BinCspWithModulator red = wsat3am_to_bincsp_vc(w.formula, w.k);
            emit(out_path(".bcsp"), write_bincsp(red.instance), red.report,
                 {join_ints("modulator", red.modulator), join_ints("forest", red.forest)});
        } else if (o.rule == "w2d1hard") {
            WeightedSatInstance w = parse_wsat(read_file(in0));
            int d = std::max(1, normalization_level(w.formula) / 2);
            BinCspWithModulator red = wsat2d1am_to_bincsp_forest_modulator(w.formula, w.k, d);
            emit(out_path(".bcsp"), write_bincsp(red.instance), red.report,
                 {join_ints("modulator", red.modulator), join_ints("forest", red.forest)});
        } else if (o.rule == "fvs-hard") {
            WeightedSatInstance w = parse_wsat(read_file(in0));
            NormalizedFormula f = w.formula;
            int level = normalization_level(f);
            if (level % 2 == 0) f = pad_to_level(f, level + 1);
            BinCspWithModulator red = wsatam_to_bincsp_fvs(f, w.k);
            emit(out_path(".bcsp"), write_bincsp(red.instance), red.report,
                 {join_ints("modulator", red.modulator), join_ints("forest", red.forest)});
        } else if (o.rule == "vc-to-wsat3") {
            BinCspInstance inst = parse_bincsp(read_file(in0));
            inst.validate();
            std::vector<int> cover = need_cover();
            WeightedSatInstance w = bincsp_vc_to_wsat3(inst, cover);
            ReductionReport rep{"bincsp_vc_to_wsat3", "weight", w.k, {}};
            emit(out_path(".wsat"), write_wsat(w), rep, {join_ints("cover", cover)});
        } else if (o.rule == "modtd-to-wsat") {
            BinCspInstance inst = parse_bincsp(read_file(in0));
            inst.validate();
            std::vector<int> w = need_cover();
            std::vector<int> forest = mark_modulator(need_tree().parents, w, inst.n);
            WeightedSatInstance ws = bincsp_modtd_to_wsat2d1(inst, w, forest);
            ReductionReport rep{"bincsp_modtd_to_wsat2d1", "weight", ws.k, {}};
            emit(out_path(".wsat"), write_wsat(ws), rep, {join_ints("modulator", w)});
        } else if (o.rule == "fvs-to-circuit") {
            BinCspInstance inst = parse_bincsp(read_file(in0));
            inst.validate();
            std::vector<int> fvs = need_cover();
            CircuitWithBudget c = bincsp_fvs_to_circuit(inst, fvs);
            emit(out_path(".circ"), write_circuit(c.circuit), c.report,
                 {join_ints("fvs", fvs), "weight " + std::to_string(c.k)});
        } else if (o.rule == "bincsp-to-lc") {
            BinCspInstance inst = parse_bincsp(read_file(in0));
            inst.validate();
            TaggedListColoring tagged = bincsp_to_listcoloring(inst);
            ReductionReport rep{"bincsp_to_listcoloring", "gadgets", tagged.gadget_vertices, {}};
            emit(out_path(".lc"), write_listcoloring(tagged.lc), rep, {});
        } else if (o.rule == "lc-to-bincsp") {
            ListColoringInstance lc = parse_listcoloring(read_file(in0));
            lc.validate();
            ReductionReport rep{"listcoloring_to_bincsp", "variables", lc.graph.n, {}};
            emit(out_path(".bcsp"), write_bincsp(listcoloring_to_bincsp(lc)), rep, {});
        } else if (o.rule == "lc-vc-to-wsat2") {
            ListColoringInstance lc = parse_listcoloring(read_file(in0));
            lc.validate();
            std::vector<int> cover = need_cover();
            WeightedSatInstance w = listcoloring_vc_to_wsat2(lc, cover);
            ReductionReport rep{"listcoloring_vc_to_wsat2", "weight", w.k, {}};
            emit(out_path(".wsat"), write_wsat(w), rep, {join_ints("cover", cover)});
        } else if (o.rule == "lc-to-precol") {
            ListColoringInstance lc = parse_listcoloring(read_file(in0));
            lc.validate();
            std::vector<int> w = need_cover();
            std::vector<int> forest = mark_modulator(need_tree().parents, w, lc.graph.n);
            PrecoloringWithModulator red = listcoloring_to_precolext(lc, w, forest);
            emit(out_path(".pre"), write_precoloring(red.instance), red.report,
                 {join_ints("modulator", red.modulator), join_ints("forest", red.forest)});
        } else if (o.rule == "td-machine") {
            BinCspInstance inst = parse_bincsp(read_file(in0));
            inst.validate();
            EliminationForest f{need_tree().parents};
            std::string why;
            if (!validate_elimination_forest(inst.gaifman(), f, &why))
                throw InputError("tree rejected: " + why);
            CompiledMachine c = compile_bincsp_td(inst, f);
            ReductionReport rep{"compile_bincsp_td", "depth", f.size() ? f.depth() : 0, {}};
            std::ostringstream lim;
            lim << "limits " << c.limits.working_space << " " << c.limits.stack_bits << " "
                << c.limits.nondeterminism << " " << c.limits.conondeterminism << " "
                << c.limits.alternation;
            emit(out_path(".arosm"), write_arosm(c.machine), rep,
                 {join_ints("input", c.input), lim.str()});
        } else if (o.rule == "td-structure") {
            BinCspInstance inst = parse_bincsp(read_file(in0));
            inst.validate();
            EliminationForest f{need_tree().parents};
            GuidedEncoding enc = bincsp_td_to_structure(inst, f);
            std::string spath = out_path(".struct");
            std::string fpath = with_ext(spath, ".fo");
            ReductionReport rep{"bincsp_td_to_structure", "chain", enc.sentence.k, {}};
            write_file(spath, write_struct(enc.structure));
            write_file(fpath, write_fo(enc.sentence));
            write_file(spath + ".report", report_text(rep, {}));
            out << "wrote " << spath << "\n";
            out << "wrote " << fpath << "\n";
            out << "wrote " << spath << ".report\n";
        } else if (o.rule == "dfold-prenex") {
            BinCspInstance inst = parse_bincsp(read_file(in0));
            inst.validate();
            TreeFile tf = need_tree();
            if (!tf.bags) throw InputError("rule dfold-prenex needs a tree file with bags");
            FatEliminationTree w{tf.parents, *tf.bags};
            PrenexEncoding enc = bincsp_dfold_to_prenex(inst, w);
            std::string spath = out_path(".struct");
            std::string fpath = with_ext(spath, ".fo");
            ReductionReport rep{"bincsp_dfold_to_prenex", "blocks",
                                int(enc.sentence.blocks.size()), {}};
            write_file(spath, write_struct(enc.structure));
            write_file(fpath, write_fo(enc.sentence));
            write_file(spath + ".report", report_text(rep, {}));
            out << "wrote " << spath << "\n";
            out << "wrote " << fpath << "\n";
            out << "wrote " << spath << ".report\n";
        } else {
            throw InputError("unknown rule: " + o.rule);
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_verify(const CampaignConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        CampaignResult r = run_campaign(cfg);
        out << "rule " << cfg.rule << " trials " << r.trials << " mismatches " << r.mismatches
            << " invalid " << r.invalid << " skipped " << r.skipped << "\n";
        std::ios::fmtflags flags = out.flags();
        std::streamsize prec = out.precision();
        out << std::fixed << std::setprecision(2) << "time_ms p50 " << percentile(r.millis, 50)
            << " p90 " << percentile(r.millis, 90) << " max " << percentile(r.millis, 100)
            << "\n";
        out.flags(flags);
        out.precision(prec);
        return r.clean() ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_decompose(const DecomposeOptions& o, std::ostream& out, std::ostream& err) {
    try {
        Graph g = load_graph(o.file);
        if (o.parameter == "td") {
            auto [depth, forest] = treedepth_exact(g);
            std::string path = o.out.empty() ? with_ext(o.file, ".tree") : o.out;
            TreeFile tf;
            tf.parents = forest.parent;
            write_file(path, write_tree_file(tf));
            out << "treedepth " << depth << "\n";
            out << "wrote " << path << "\n";
            return 0;
        }
        if (o.parameter == "vc" || o.parameter == "fvs") {
            if (o.k < 0) throw InputError("parameter " + o.parameter + " needs --k");
            bool is_vc = o.parameter == "vc";
            auto w = is_vc ? vertex_cover_exact(g, o.k) : feedback_vertex_set_exact(g, o.k);
            const char* what = is_vc ? "vertex cover" : "feedback vertex set";
            if (!w) {
                out << "no " << what << " of size " << o.k << "\n";
                return 1;
            }
            std::string path = o.out.empty() ? with_ext(o.file, ".set") : o.out;
            write_file(path, write_vertex_set(*w));
            out << (is_vc ? "vertex_cover " : "feedback_vertex_set ") << w->size() << "\n";
            out << "wrote " << path << "\n";
            return 0;
        }
        if (o.parameter == "mod-td") {
            if (o.d < 1 || o.k < 0) throw InputError("parameter mod-td needs --d and --k");
            auto m = modulator_to_treedepth(g, o.d, o.k);
            if (!m) {
                out << "no modulator of size " << o.k << " to treedepth " << o.d << "\n";
                return 1;
            }
            std::string spath = o.out.empty() ? with_ext(o.file, ".set") : o.out;
            std::string tpath = with_ext(spath, ".tree");
            write_file(spath, write_vertex_set(m->vertices));
            TreeFile tf;
            tf.parents = m->forest.parent;
            for (int& p : tf.parents)
                if (p == -2) p = -1;  // .tree files have no modulator marker
            write_file(tpath, write_tree_file(tf));
            out << "modulator " << m->vertices.size() << "\n";
            out << "wrote " << spath << "\n";
            out << "wrote " << tpath << "\n";
            return 0;
        }
        if (o.parameter == "dfold") {
            if (o.d < 1) throw InputError("parameter dfold needs --d");
            int k = d_fold_vc_number(g, o.d);
            out << "dfold_vc " << k << "\n";
            if (auto w = fat_elimination_tree(g, o.d, k)) {
                std::string path = o.out.empty() ? with_ext(o.file, ".tree") : o.out;
                TreeFile tf;
                tf.parents = w->parent;
                tf.bags = w->bags;
                write_file(path, write_tree_file(tf));
                out << "wrote " << path << "\n";
            }
            return 0;
        }
        if (o.parameter == "fat-tree") {
            if (o.d < 1 || o.k < 0) throw InputError("parameter fat-tree needs --d and --k");
            auto w = fat_elimination_tree(g, o.d, o.k);
            if (!w) {
                out << "no fat elimination tree of depth " << o.d << " and width " << o.k
                    << "\n";
                return 1;
            }
            std::string path = o.out.empty() ? with_ext(o.file, ".tree") : o.out;
            TreeFile tf;
            tf.parents = w->parent;
            tf.bags = w->bags;
            write_file(path, write_tree_file(tf));
            out << "fat_tree depth " << w->depth() << " width " << w->width() << "\n";
            out << "wrote " << path << "\n";
            return 0;
        }
        throw InputError("unknown parameter: " + o.parameter);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
    try {
        if (o.max_n < 1) throw InputError("max-n must be positive");
        if (o.max_dom < 1) throw InputError("max-dom must be positive");
        if (o.level < 2) throw InputError("level must be at least 2");
        Rng rng(o.seed);
        std::string text;
        if (o.kind == "bincsp") {
            text = write_bincsp(random_instance(rng.range(1, o.max_n), rng.range(1, o.max_dom),
                                                0.5, 0.6, rng.next()));
        } else if (o.kind == "graph") {
            text = write_graph(random_graph(rng, rng.range(1, o.max_n), 0.5));
        } else if (o.kind == "wsat") {
            int vars = rng.range(1, o.max_n);
            WeightedSatInstance w;
            w.formula = random_normalized_formula(o.level, vars, 3, rng.next(), -1);
            w.k = rng.range(0, std::min(3, vars));
            text = write_wsat(w);
        } else if (o.kind == "listcoloring") {
            text = write_listcoloring(
                random_listcoloring(rng, rng.range(1, o.max_n), rng.range(1, o.max_dom)));
        } else {
            throw InputError("unknown kind: " + o.kind);
        }
        if (o.out.empty()) {
            out << text;
            return 0;
        }
        write_file(o.out, text);
        out << "wrote " << o.out << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace csplab
