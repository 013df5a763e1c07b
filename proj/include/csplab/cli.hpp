#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "csplab/machine.hpp"
#include "csplab/reductions.hpp"

namespace csplab {

// .set file: "set <count>" header, then one "v <id>" line per vertex.
// Entries are distinct and nonnegative; the parsed set comes back sorted.
std::vector<int> parse_vertex_set(const std::string& text);
std::string write_vertex_set(const std::vector<int>& vertices);

// Hand-built block-regular machine bundled for demos and campaigns: the
// machine, its guessed-computation tree, the compilation budgets, and the
// evaluation limits matching those budgets.
struct RegularToy {
    std::string name;
    ArosMachine machine;
    OrderedTree tree;
    RegularBudgets budgets;
    ResourceLimits limits;
};
std::vector<RegularToy> bundled_regular_toys();

// One seeded verification campaign. `rule` names a registered trial body;
// trial i reseeds from (seed, i), so reruns with the same config reproduce
// every draw. The caps bound the generated inputs: max_n/max_dom size the
// instances, d and k size the structural witnesses. out_dir, when nonempty,
// receives a deterministic per-trial status file named <rule>.trials.
struct CampaignConfig {
    std::string rule;
    int trials = 0;
    std::uint64_t seed = 0;
    int max_n = 5;
    int max_dom = 3;
    int d = 2;
    int k = 3;
    std::string out_dir;

    void validate() const;  // caps positive, rule registered
};

struct CampaignResult {
    int trials = 0;
    int mismatches = 0;          // oracle disagreements
    int invalid = 0;             // witness or declared-parameter check failures
    int skipped = 0;             // trials abandoned at a resource cap
    std::vector<double> millis;  // wall time per trial, indexed by trial

    bool clean() const { return mismatches == 0 && invalid == 0; }
};

std::vector<std::string> campaign_rules();
CampaignResult run_campaign(const CampaignConfig& cfg);

// p in [0,100]; nearest-rank percentile of the sample, 0 on an empty one.
double percentile(std::vector<double> sample, double p);

struct SolveOptions {
    std::string file;
    std::string method = "brute";  // brute | dp | vc | modulator
    std::string tree;              // .tree witness for dp and modulator
    std::string cover;             // .set witness for vc and modulator
    bool witness = false;          // print the satisfying assignment
};

struct ReduceOptions {
    std::string rule;
    std::vector<std::string> inputs;
    std::string cover;  // .set witness consumed by instance-side rules
    std::string tree;   // .tree witness
    std::string out;    // output path; derived from the input when empty
};

struct DecomposeOptions {
    std::string file;       // .graph, or an instance whose gaifman graph is used
    std::string parameter;  // td | vc | fvs | mod-td | dfold | fat-tree
    int d = -1;
    int k = -1;
    std::string out;  // witness path; derived from the input when empty
};

struct GenOptions {
    std::string kind = "bincsp";  // bincsp | graph | wsat | listcoloring
    int max_n = 5;
    int max_dom = 3;
    int level = 3;  // wsat only
    std::uint64_t seed = 0;
    std::string out;  // empty prints the artifact to stdout
};

// Exit codes, shared with the csplab binary: solve 0 = satisfiable,
// 1 = unsatisfiable; verify 0 = clean campaign, 1 = mismatches or invalid
// witnesses; decompose 0 = witness found, 1 = none within the bounds;
// 2 = any error (bad file, unknown rule or method, violated precondition,
// resource cap). Timing is printed only by cmd_verify and only to `out`;
// files written by any command depend on nothing but inputs, seed and flags.
int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err);
int cmd_reduce(const ReduceOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const CampaignConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_decompose(const DecomposeOptions& o, std::ostream& out, std::ostream& err);
int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err);

} // namespace csplab
