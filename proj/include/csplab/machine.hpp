#pragma once
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "csplab/core.hpp"
#include "csplab/structure.hpp"
#include "csplab/unitrees.hpp"

namespace csplab {

enum class StateKind { existential, universal, deterministic };

// View of a configuration without the stack: state, work tape bits, and the
// two head positions. The read-only input tape lives outside the machine.
struct StacklessConfiguration {
    int state = 0;
    std::vector<int> work;
    int input_head = 0;
    int work_head = 0;

    bool operator==(const StacklessConfiguration&) const = default;
    bool operator<(const StacklessConfiguration& o) const {
        return std::tie(state, work, input_head, work_head) <
               std::tie(o.state, o.work, o.input_head, o.work_head);
    }
};

struct Configuration {
    StacklessConfiguration stackless;
    std::vector<int> stack;  // bits in push order; read only at acceptance
};

// Macro update applied after a transition has moved the state and pushed: it
// may rewrite the work tape and move the heads, but never touches the stack.
// Hooks named tape<i> (set the work tape to the binary encoding of i) are
// built in; any other name must be registered on the machine.
using MacroUpdate = std::function<void(StacklessConfiguration&, const std::vector<int>&)>;

struct MachineTransition {
    int next = -1;
    int push = -1;      // -1 = push nothing, else the pushed bit
    std::string hook;   // "" = leave tape and heads alone
};

// Alternating machine over a read-only input tape, a work tape, and a
// push-only stack. Deterministic states carry one transition, existential and
// universal states two (the 0-transition first). The computation stops at the
// designated final state, where the work tape is decoded as a 1-based index i
// and the machine accepts iff stack bit i exists and equals 1.
struct ArosMachine {
    std::vector<StateKind> kind;
    int start = 0;
    int final_state = -1;
    std::vector<std::vector<MachineTransition>> delta;
    std::map<std::string, MacroUpdate> hooks;

    int add_state(StateKind k);
    void validate() const;
};

struct ResourceLimits {
    long working_space = 0;     // work-tape cells, head included
    long stack_bits = 0;
    long nondeterminism = 0;    // existential configurations per branch
    long conondeterminism = 0;  // universal configurations per branch
    long alternation = 0;       // blocks per branch
};

struct ResourceUsage {
    long working_space = 0;
    long stack_bits = 0;
    long nondeterminism = 0;
    long conondeterminism = 0;
    long alternation = 0;
};

// Node of a computation tree: universal configurations keep both children,
// deterministic and existential ones keep one, final leaves none. `taken`
// records the branch bit chosen at an existential node.
struct ForallNode {
    Configuration config;
    int taken = -1;
    std::vector<ForallNode> children;
};

struct DecideResult {
    bool accept = false;
    ResourceUsage usage;             // of the accepting tree, zeros otherwise
    std::optional<ForallNode> tree;  // the accepting tree that was found
};

// Alternating evaluation with per-branch resource accounting. A branch that
// would overshoot any limit rejects; existential choices try 0 before 1 and
// the first accepting tree under that order is reported. node_cap bounds the
// configurations explored during the search.
DecideResult decide(const ArosMachine& m, const std::vector<int>& input,
                    const ResourceLimits& limits, long node_cap = 4'000'000);

// Independent recount of the five resource measures of a tree produced by
// decide (node kinds are inferred from the tree shape).
ResourceUsage measure_tree(const ForallNode& t);

// Tree of stackless configurations grown from c: universal configurations
// branch on both transitions, deterministic ones advance, and growth stops at
// existential or final configurations. branch[i] is the bit taken on the edge
// into node i (-1 on deterministic edges), push[i] the bit pushed on it.
struct UniversalBlock {
    std::vector<StacklessConfiguration> node;  // preorder, 0-branch first
    std::vector<int> parent;                   // -1 at the root
    std::vector<std::vector<int>> children;
    std::vector<int> branch;
    std::vector<int> push;

    int size() const { return int(node.size()); }
    std::vector<int> leaves() const;  // in preorder
};

UniversalBlock universal_block(const ArosMachine& m, const StacklessConfiguration& c,
                               const std::vector<int>& input = {}, long cap = 100'000);

// A binary CSP compiled into a machine that guesses an assignment top-down
// along an elimination tree and verifies it one constraint and one stack bit
// at a time. The instance (extended with one dummy root variable) is baked
// into the transition table; input carries the instance text as ASCII bits;
// limits are sufficient for every accepting run of the compiled machine.
struct CompiledMachine {
    ArosMachine machine;
    std::vector<int> input;
    ResourceLimits limits;
};

CompiledMachine compile_bincsp_td(const BinCspInstance& inst, const EliminationForest& t);

// Budgets for the reverse direction: at most A existential and B universal
// configurations per branch, total stack length at most stack_bits, and a
// guessed-computation tree of depth at most alternation_k.
struct RegularBudgets {
    long nondeterminism = 0;    // A
    long conondeterminism = 0;  // B
    long stack_bits = 0;
    int alternation_k = 0;      // K, also the per-edge subdivision parameter
    long config_cap = 4096;     // explored stackless configurations
    long domain_cap = 20000;    // value tuples per variable
};

// Machine acceptance encoded as a binary CSP whose constraint graph has the
// subdivision S of t as an elimination tree: each principal vertex carries a
// configuration snapshot, subdivision vertices carry the staged stack words
// and counters between consecutive snapshots.
struct RegularReduction {
    BinCspInstance instance;
    EliminationForest forest;    // S
    std::vector<int> principal;  // S vertex -> node of t, -1 on subdivision vertices
};

RegularReduction compile_regular_arosm_to_bincsp(const ArosMachine& m, const OrderedTree& t,
                                                 const std::vector<int>& input,
                                                 const RegularBudgets& budgets);

// .arosm format. Hooks other than the built-in tape<i> family must be
// supplied in hook_table.
ArosMachine parse_arosm(const std::string& text,
                        const std::map<std::string, MacroUpdate>& hook_table = {});
std::string write_arosm(const ArosMachine& m);

} // namespace csplab
