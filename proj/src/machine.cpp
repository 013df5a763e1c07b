#include "csplab/machine.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace csplab {
namespace {

int ceil_log2(long n) {
    if (n <= 1) return 0;
    return int(std::bit_width(static_cast<unsigned long>(n - 1)));
}

long bit_length(long v) {
    return v <= 0 ? 0 : long(std::bit_width(static_cast<unsigned long>(v)));
}

std::vector<int> number_bits(long v) {
    std::vector<int> out;
    for (long i = bit_length(v) - 1; i >= 0; --i) out.push_back(int((v >> i) & 1));
    return out;
}

// Work tape decoded as a most-significant-bit-first number; saturates far
// beyond any representable stack position.
long tape_number(const std::vector<int>& work) {
    long v = 0;
    for (int b : work) {
        if (b != 0 && b != 1) throw InputError("work tape holds a non-bit");
        if (v >= (1L << 58)) return 1L << 60;
        v = v * 2 + b;
    }
    return v;
}

bool builtin_tape_hook(const std::string& name, long* value) {
    if (name.size() <= 4 || name.compare(0, 4, "tape") != 0) return false;
    long v = 0;
    for (size_t i = 4; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
        if (v >= (1L << 50)) return false;
        v = v * 10 + (name[i] - '0');
    }
    *value = v;
    return true;
}

void run_hook(const ArosMachine& m, const std::string& name, StacklessConfiguration& c,
              const std::vector<int>& input) {
    if (name.empty()) return;
    auto it = m.hooks.find(name);
    if (it != m.hooks.end()) {
        it->second(c, input);
        if (c.work_head < 0 || c.input_head < 0) throw InputError("head moved left of the tape");
        return;
    }
    long v = 0;
    if (builtin_tape_hook(name, &v)) {
        c.work = number_bits(v);
        c.work_head = 0;
        return;
    }
    throw InputError("unknown macro update hook " + name);
}

Configuration apply_transition(const ArosMachine& m, const Configuration& c,
                               const MachineTransition& t, const std::vector<int>& input) {
    Configuration out = c;
    if (t.push != -1) out.stack.push_back(t.push);
    out.stackless.state = t.next;
    run_hook(m, t.hook, out.stackless, input);
    return out;
}

} // namespace

int ArosMachine::add_state(StateKind k) {
    kind.push_back(k);
    delta.emplace_back();
    return int(kind.size()) - 1;
}

void ArosMachine::validate() const {
    const int n = int(kind.size());
    if (n == 0) throw InputError("machine has no states");
    if (int(delta.size()) != n) throw InputError("transition table size differs from state count");
    if (start < 0 || start >= n) throw InputError("start state out of range");
    if (final_state < 0 || final_state >= n) throw InputError("machine needs a final state");
    if (kind[size_t(final_state)] != StateKind::deterministic)
        throw InputError("final state must be deterministic");
    for (int s = 0; s < n; ++s) {
        const auto& tr = delta[size_t(s)];
        if (s == final_state) {
            if (!tr.empty()) throw InputError("final state cannot have transitions");
            continue;
        }
        size_t want = kind[size_t(s)] == StateKind::deterministic ? 1 : 2;
        if (tr.size() != want)
            throw InputError("state " + std::to_string(s) + " needs " + std::to_string(want) +
                             " transitions, has " + std::to_string(tr.size()));
        for (const auto& t : tr) {
            if (t.next < 0 || t.next >= n) throw InputError("transition target out of range");
            if (t.push < -1 || t.push > 1) throw InputError("pushed symbol must be a bit");
            if (!t.hook.empty() && !hooks.count(t.hook)) {
                long v = 0;
                if (!builtin_tape_hook(t.hook, &v))
                    throw InputError("unknown macro update hook " + t.hook);
            }
        }
    }
}

namespace {

// Per-branch resource tally carried down the computation tree. block_kind
// tracks what the open block holds: 0 nothing forcing yet, 1 existential,
// 2 universal. Deterministic and final configurations never force a block
// switch, so a greedy scan yields the minimal block count.
struct BranchTally {
    long e = 0, u = 0, blocks = 0;
    int block_kind = 0;
    long cells = 0, stack = 0;
};

ResourceUsage max_usage(const ResourceUsage& a, const ResourceUsage& b) {
    return {std::max(a.working_space, b.working_space), std::max(a.stack_bits, b.stack_bits),
            std::max(a.nondeterminism, b.nondeterminism),
            std::max(a.conondeterminism, b.conondeterminism),
            std::max(a.alternation, b.alternation)};
}

struct Searcher {
    const ArosMachine& m;
    const std::vector<int>& input;
    const ResourceLimits& lim;
    long cap;
    long explored = 0;

    struct Found {
        ForallNode node;
        ResourceUsage usage;
    };

    static std::optional<Found> fold(std::vector<ForallNode> chain, ForallNode tip,
                                     ResourceUsage use) {
        while (!chain.empty()) {
            ForallNode n = std::move(chain.back());
            chain.pop_back();
            n.children.push_back(std::move(tip));
            tip = std::move(n);
        }
        return Found{std::move(tip), use};
    }

    std::optional<Found> run(Configuration c, BranchTally ct) {
        std::vector<ForallNode> chain;
        // a repeated stackless view at the same stack height means a
        // deterministic loop that can never make progress again
        std::set<std::pair<StacklessConfiguration, size_t>> seen;
        for (;;) {
            if (++explored > cap)
                throw ResourceError("decide explored more than " + std::to_string(cap) +
                                    " configurations");
            const StacklessConfiguration& sc = c.stackless;
            long cells = std::max<long>(long(sc.work.size()), long(sc.work_head) + 1);
            ct.cells = std::max(ct.cells, cells);
            ct.stack = std::max(ct.stack, long(c.stack.size()));
            if (cells > lim.working_space || long(c.stack.size()) > lim.stack_bits)
                return std::nullopt;
            const bool final = sc.state == m.final_state;
            const StateKind k = m.kind[size_t(sc.state)];
            if (final || k == StateKind::deterministic) {
                if (ct.blocks == 0) ct.blocks = 1;
            } else if (k == StateKind::existential) {
                if (ct.block_kind == 2 || ct.blocks == 0) ++ct.blocks;
                ct.block_kind = 1;
                if (++ct.e > lim.nondeterminism) return std::nullopt;
            } else {
                if (ct.block_kind == 1 || ct.blocks == 0) ++ct.blocks;
                ct.block_kind = 2;
                if (++ct.u > lim.conondeterminism) return std::nullopt;
            }
            if (ct.blocks > lim.alternation) return std::nullopt;

            if (final) {
                long i = tape_number(sc.work);
                if (i < 1 || i > long(c.stack.size()) || c.stack[size_t(i) - 1] != 1)
                    return std::nullopt;
                ForallNode leaf;
                leaf.config = std::move(c);
                return fold(std::move(chain), std::move(leaf),
                            {ct.cells, ct.stack, ct.e, ct.u, ct.blocks});
            }
            if (k == StateKind::deterministic) {
                if (!seen.insert({sc, c.stack.size()}).second) return std::nullopt;
                ForallNode link;
                link.config = c;
                chain.push_back(std::move(link));
                c = apply_transition(m, c, m.delta[size_t(sc.state)][0], input);
                continue;
            }
            if (k == StateKind::existential) {
                for (int b = 0; b < 2; ++b) {
                    auto sub =
                        run(apply_transition(m, c, m.delta[size_t(sc.state)][size_t(b)], input), ct);
                    if (!sub) continue;
                    ForallNode node;
                    node.config = std::move(c);
                    node.taken = b;
                    node.children.push_back(std::move(sub->node));
                    return fold(std::move(chain), std::move(node), sub->usage);
                }
                return std::nullopt;
            }
            auto left = run(apply_transition(m, c, m.delta[size_t(sc.state)][0], input), ct);
            if (!left) return std::nullopt;
            auto right = run(apply_transition(m, c, m.delta[size_t(sc.state)][1], input), ct);
            if (!right) return std::nullopt;
            ForallNode node;
            node.config = std::move(c);
            node.children.push_back(std::move(left->node));
            node.children.push_back(std::move(right->node));
            return fold(std::move(chain), std::move(node), max_usage(left->usage, right->usage));
        }
    }
};

} // namespace

DecideResult decide(const ArosMachine& m, const std::vector<int>& input,
                    const ResourceLimits& limits, long node_cap) {
    m.validate();
    for (int b : input)
        if (b != 0 && b != 1) throw InputError("input must be a bit string");
    Searcher s{m, input, limits, node_cap};
    Configuration c0;
    c0.stackless.state = m.start;
    auto found = s.run(std::move(c0), {});
    DecideResult r;
    if (found) {
        r.accept = true;
        r.usage = found->usage;
        r.tree = std::move(found->node);
    }
    return r;
}

namespace {

void measure_walk(const ForallNode& t, BranchTally ct, ResourceUsage& out) {
    const StacklessConfiguration& sc = t.config.stackless;
    long cells = std::max<long>(long(sc.work.size()), long(sc.work_head) + 1);
    ct.cells = std::max(ct.cells, cells);
    ct.stack = std::max(ct.stack, long(t.config.stack.size()));
    if (t.children.size() == 2) {
        if (ct.block_kind == 1 || ct.blocks == 0) ++ct.blocks;
        ct.block_kind = 2;
        ++ct.u;
    } else if (t.children.size() == 1 && t.taken >= 0) {
        if (ct.block_kind == 2 || ct.blocks == 0) ++ct.blocks;
        ct.block_kind = 1;
        ++ct.e;
    } else {
        if (ct.blocks == 0) ct.blocks = 1;
    }
    if (t.children.empty()) {
        ResourceUsage leaf{ct.cells, ct.stack, ct.e, ct.u, ct.blocks};
        out = max_usage(out, leaf);
        return;
    }
    for (const ForallNode& ch : t.children) measure_walk(ch, ct, out);
}

} // namespace

ResourceUsage measure_tree(const ForallNode& t) {
    ResourceUsage out;
    measure_walk(t, {}, out);
    return out;
}

std::vector<int> UniversalBlock::leaves() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (children[size_t(i)].empty()) out.push_back(i);
    return out;
}

UniversalBlock universal_block(const ArosMachine& m, const StacklessConfiguration& c,
                               const std::vector<int>& input, long cap) {
    m.validate();
    UniversalBlock ub;
    struct Item {
        StacklessConfiguration conf;
        int parent, branch, push;
    };
    std::vector<Item> todo;
    todo.push_back({c, -1, -1, -1});
    while (!todo.empty()) {
        Item it = std::move(todo.back());
        todo.pop_back();
        if (long(ub.node.size()) >= cap)
            throw ResourceError("universal block grew past " + std::to_string(cap) + " nodes");
        const int id = int(ub.node.size());
        ub.node.push_back(std::move(it.conf));
        ub.parent.push_back(it.parent);
        ub.children.emplace_back();
        ub.branch.push_back(it.branch);
        ub.push.push_back(it.push);
        if (it.parent >= 0) ub.children[size_t(it.parent)].push_back(id);
        const StacklessConfiguration& sc = ub.node[size_t(id)];
        if (sc.state == m.final_state) continue;
        const StateKind k = m.kind[size_t(sc.state)];
        if (k == StateKind::existential) continue;
        if (k == StateKind::deterministic) {
            const MachineTransition& tr = m.delta[size_t(sc.state)][0];
            StacklessConfiguration nx = sc;
            nx.state = tr.next;
            run_hook(m, tr.hook, nx, input);
            todo.push_back({std::move(nx), id, -1, tr.push});
            continue;
        }
        // push the 1-branch first so the 0-branch pops first (preorder)
        for (int b = 1; b >= 0; --b) {
            const MachineTransition& tr = m.delta[size_t(sc.state)][size_t(b)];
            StacklessConfiguration nx = sc;
            nx.state = tr.next;
            run_hook(m, tr.hook, nx, input);
            todo.push_back({std::move(nx), id, b, tr.push});
        }
    }
    return ub;
}

CompiledMachine compile_bincsp_td(const BinCspInstance& inst, const EliminationForest& t) {
    inst.validate();
    if (t.size() != inst.n) throw InputError("forest size differs from variable count");
    {
        std::vector<std::pair<int, int>> ge;
        for (const auto& [key, pairs] : inst.constraints) ge.push_back(key);
        std::string why;
        if (!validate_elimination_forest(Graph(inst.n, std::move(ge)), t, &why))
            throw InputError("forest does not cover the constraint graph: " + why);
    }

    // one dummy root variable with a fixed value keeps the tree connected
    BinCspInstance ext = inst;
    const int dummy = inst.n;
    ext.n = inst.n + 1;
    ext.domains.push_back({0});
    for (int v = 0; v < inst.n; ++v) {
        std::vector<std::pair<int, int>> all;
        for (int d : inst.domains[size_t(v)]) all.emplace_back(0, d);
        ext.add_constraint(dummy, v, std::move(all));
    }

    std::vector<int> par(static_cast<size_t>(ext.n));
    for (int v = 0; v < inst.n; ++v)
        par[size_t(v)] = t.parent[size_t(v)] < 0 ? dummy : t.parent[size_t(v)];
    par[size_t(dummy)] = -1;
    const RootedTree tree = RootedTree::from_parents(par);
    const EdgeLabeling lab = tree_edge_labeling(tree);

    std::vector<int> depth(static_cast<size_t>(ext.n));
    for (int v = 0; v < ext.n; ++v) depth[size_t(v)] = int(tree.ancestors(v).size());

    int maxdom = 1;
    for (const auto& d : ext.domains) maxdom = std::max(maxdom, int(d.size()));
    const int L = std::max(1, ceil_log2(maxdom));  // value index bits per variable
    const long depth_total = tree.depth();

    std::vector<std::pair<int, int>> edges;
    for (const auto& [key, pairs] : ext.constraints) edges.push_back(key);
    const int m_edges = int(edges.size());
    const int EB = m_edges > 0 ? std::max(1, ceil_log2(m_edges)) : 0;
    const int JB = ceil_log2(L);
    const int PB = 1 + JB;  // probe guess: side bit plus position bits

    ArosMachine mach;
    const int fin = mach.add_state(StateKind::deterministic);
    mach.final_state = fin;
    long max_index = 1;

    auto set_delta = [&](int s, std::vector<MachineTransition> tr) {
        mach.delta[size_t(s)] = std::move(tr);
    };
    // bit 1 of the stack is a sentinel 1 pushed at the start, so writing
    // index 1 accepts unconditionally and index 0 is always out of range
    auto accept_now = [&]() { return MachineTransition{fin, -1, "tape1"}; };
    auto reject_now = [&](int push) { return MachineTransition{fin, push, "tape0"}; };

    // complete guessing tree over `bits` choices; land(code) ends each path
    auto guess_trie = [&](StateKind k, int bits,
                          const std::function<MachineTransition(long)>& land) -> int {
        std::vector<std::vector<int>> level(static_cast<size_t>(bits));
        for (int j = bits - 1; j >= 0; --j) {
            level[size_t(j)].resize(static_cast<size_t>(1L << j));
            for (long p = 0; p < (1L << j); ++p) {
                int s = mach.add_state(k);
                std::vector<MachineTransition> tr(2);
                for (int b = 0; b < 2; ++b) {
                    long code = 2 * p + b;
                    if (j + 1 < bits)
                        tr[size_t(b)] = {level[size_t(j + 1)][size_t(code)], -1, ""};
                    else
                        tr[size_t(b)] = land(code);
                }
                set_delta(s, std::move(tr));
                level[size_t(j)][size_t(p)] = s;
            }
        }
        return level[0][0];
    };

    // check one stack bit of one endpoint of edge e under value indices
    // (ia, ib): each index bit x sits at the pair (x, 1-x), so bit value 1 is
    // verified on the left cell and 0 on the right cell
    auto probe_entry = [&](int e, long ia, long ib) -> int {
        auto [w, w2] = edges[size_t(e)];
        return guess_trie(StateKind::universal, PB, [&](long code) -> MachineTransition {
            long side = code >> JB;
            long j = code & ((1L << JB) - 1);
            if (j >= L) return accept_now();
            int target = side ? w2 : w;
            long idx = side ? ib : ia;
            int x = int((idx >> (L - 1 - j)) & 1);
            long pos = 1 + 2 * long(L) * (depth[size_t(target)] - 1) + 2 * j + (x ? 1 : 2);
            max_index = std::max(max_index, pos);
            return {fin, -1, "tape" + std::to_string(pos)};
        });
    };

    std::map<int, int> pair_memo;
    auto pair_entry_for = [&](int e) -> int {
        auto it = pair_memo.find(e);
        if (it != pair_memo.end()) return it->second;
        auto [w, w2] = edges[size_t(e)];
        const auto& da = ext.domains[size_t(w)];
        const auto& db = ext.domains[size_t(w2)];
        int entry = guess_trie(StateKind::existential, 2 * L, [&](long code) -> MachineTransition {
            long ia = code >> L;
            long ib = code & ((1L << L) - 1);
            if (ia >= long(da.size()) || ib >= long(db.size())) return reject_now(-1);
            if (!ext.pair_allowed(w, w2, da[size_t(ia)], db[size_t(ib)])) return reject_now(-1);
            return {probe_entry(e, ia, ib), -1, ""};
        });
        pair_memo.emplace(e, entry);
        return entry;
    };

    auto verification_entry = [&](int leaf) -> int {
        if (m_edges == 0) {
            int s = mach.add_state(StateKind::deterministic);
            set_delta(s, {accept_now()});
            return s;
        }
        std::set<int> anc;
        for (int a : tree.ancestors(leaf)) anc.insert(a);
        return guess_trie(StateKind::universal, EB, [&](long code) -> MachineTransition {
            if (code >= m_edges) return accept_now();
            auto [a, b] = edges[size_t(code)];
            if (!anc.count(a) || !anc.count(b)) return accept_now();
            return {pair_entry_for(int(code)), -1, ""};
        });
    };

    std::vector<int> ventry(static_cast<size_t>(ext.n), -1);

    // branch label guessing: flag 0 continues with one more label bit, flag 1
    // declares the label complete; wrong guesses accept vacuously
    auto label_entry = [&](int u) -> int {
        std::map<std::string, int> exact;
        std::set<std::string> prefixes;
        for (int c : tree.children[size_t(u)]) {
            const std::string& s = lab.labels.at({u, c});
            exact.emplace(s, ventry[size_t(c)]);
            for (size_t i = 0; i <= s.size(); ++i) prefixes.insert(s.substr(0, i));
        }
        std::function<int(const std::string&)> flag = [&](const std::string& w) -> int {
            std::vector<MachineTransition> bt(2);
            for (int b = 0; b < 2; ++b) {
                std::string w2 = w + char('0' + b);
                if (prefixes.count(w2))
                    bt[size_t(b)] = {flag(w2), -1, ""};
                else
                    bt[size_t(b)] = accept_now();
            }
            int bits = mach.add_state(StateKind::universal);
            set_delta(bits, std::move(bt));
            std::vector<MachineTransition> go(2);
            go[0] = {bits, -1, ""};
            auto ex = exact.find(w);
            go[1] = ex != exact.end() ? MachineTransition{ex->second, -1, ""} : accept_now();
            int f = mach.add_state(StateKind::universal);
            set_delta(f, std::move(go));
            return f;
        };
        return flag("");
    };

    // guess the L-bit value index of u; each guessed bit b is pushed as the
    // pair (b, 1-b) by an existential state and its deterministic helper
    auto eta_entry = [&](int u, int next) -> int {
        const int dsz = int(ext.domains[size_t(u)].size());
        std::vector<std::vector<int>> G(static_cast<size_t>(L));
        for (int j = L - 1; j >= 0; --j) {
            G[size_t(j)].resize(static_cast<size_t>(1L << j));
            for (long p = 0; p < (1L << j); ++p) {
                std::vector<MachineTransition> tr(2);
                for (int b = 0; b < 2; ++b) {
                    long np = 2 * p + b;
                    MachineTransition ht;
                    ht.push = 1 - b;
                    if (j + 1 < L)
                        ht.next = G[size_t(j + 1)][size_t(np)];
                    else if (np < dsz)
                        ht.next = next;
                    else {
                        ht.next = fin;
                        ht.hook = "tape0";
                    }
                    int h = mach.add_state(StateKind::deterministic);
                    set_delta(h, {ht});
                    tr[size_t(b)] = {h, b, ""};
                }
                int g = mach.add_state(StateKind::existential);
                set_delta(g, std::move(tr));
                G[size_t(j)][size_t(p)] = g;
            }
        }
        return G[0][0];
    };

    std::vector<int> post;
    std::function<void(int)> po = [&](int v) {
        for (int c : tree.children[size_t(v)]) po(c);
        post.push_back(v);
    };
    po(tree.root);

    for (int v : post) {
        int next = tree.children[size_t(v)].empty() ? verification_entry(v) : label_entry(v);
        if (v != dummy) {
            ventry[size_t(v)] = eta_entry(v, next);
            continue;
        }
        // the dummy value has index 0: push the sentinel and then the fixed
        // pair encoding deterministically
        int after = next;
        for (int i = 2 * L - 1; i >= 0; --i) {
            int s = mach.add_state(StateKind::deterministic);
            set_delta(s, {MachineTransition{after, i % 2 == 0 ? 0 : 1, ""}});
            after = s;
        }
        int s0 = mach.add_state(StateKind::deterministic);
        set_delta(s0, {MachineTransition{after, 1, ""}});
        mach.start = s0;
    }

    // worst universal count per branch: wandering label guesses stop at their
    // vertex, exact guesses continue into the child
    std::function<long(int)> conon_max = [&](int u) -> long {
        if (tree.children[size_t(u)].empty()) return m_edges > 0 ? long(EB + PB) : 0;
        long best = 0, maxlab = 0;
        for (int c : tree.children[size_t(u)]) {
            long len = long(lab.labels.at({u, c}).size());
            maxlab = std::max(maxlab, len);
            best = std::max(best, 2 * len + 1 + conon_max(c));
        }
        return std::max(best, 2 * maxlab + 2);
    };

    ResourceLimits lim;
    lim.working_space = std::max<long>(1, bit_length(max_index));
    lim.stack_bits = 1 + 2 * long(L) * depth_total;
    lim.nondeterminism = long(L) * (depth_total - 1) + 2 * L;
    lim.conondeterminism = conon_max(dummy);
    lim.alternation = inst.n >= 1 ? 2 * (depth_total - 1) + 3 : 1;

    std::vector<int> input;
    const std::string text = write_bincsp(ext);
    input.reserve(text.size() * 8);
    for (unsigned char ch : text)
        for (int i = 7; i >= 0; --i) input.push_back((ch >> i) & 1);

    mach.validate();
    return {std::move(mach), std::move(input), lim};
}

namespace {

// binary strings of length <= W indexed by length then value
int pstring_id(const std::vector<int>& s) {
    long base = (1L << s.size()) - 1, val = 0;
    for (int b : s) val = val * 2 + b;
    return int(base + val);
}

std::vector<int> pstring_of(int id) {
    int len = 0;
    long base = 0;
    while (id >= base + (1L << len)) {
        base += 1L << len;
        ++len;
    }
    long val = id - base;
    std::vector<int> bits(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) bits[size_t(len - 1 - i)] = int((val >> i) & 1);
    return bits;
}

// snapshot tuples (configuration, recent stack word, existential count,
// universal count, total stack length) packed into one value token
struct TupleSpace {
    long nconf = 0, nstr = 0, a = 0, b = 0, sb = 0;

    long total() const { return nconf * nstr * (a + 1) * (b + 1) * (sb + 1); }
    long tok(long c, long p, long e, long u, long d) const {
        return (((c * nstr + p) * (a + 1) + e) * (b + 1) + u) * (sb + 1) + d;
    }
    struct Fields {
        int c = 0, p = 0;
        long e = 0, u = 0, d = 0;
    };
    Fields untok(long t) const {
        Fields f;
        f.d = t % (sb + 1);
        t /= sb + 1;
        f.u = t % (b + 1);
        t /= b + 1;
        f.e = t % (a + 1);
        t /= a + 1;
        f.p = int(t % nstr);
        f.c = int(t / nstr);
        return f;
    }
};

} // namespace

RegularReduction compile_regular_arosm_to_bincsp(const ArosMachine& m, const OrderedTree& t,
                                                 const std::vector<int>& input,
                                                 const RegularBudgets& budgets) {
    m.validate();
    t.validate();
    for (int b : input)
        if (b != 0 && b != 1) throw InputError("input must be a bit string");
    const int K = budgets.alternation_k;
    if (K < 1) throw InputError("block budget must be positive");
    if (t.depth() > K) throw InputError("tree depth exceeds the block budget");
    const long A = budgets.nondeterminism, B = budgets.conondeterminism, SB = budgets.stack_bits;
    if (A < 0 || B < 0 || SB < 0) throw InputError("budgets must be nonnegative");
    const int W = std::max(1, ceil_log2(long(input.size())));  // stack word chunk width

    // all stackless configurations the machine can reach on this input
    std::vector<StacklessConfiguration> confs;
    std::map<StacklessConfiguration, int> conf_id;
    {
        StacklessConfiguration c0;
        c0.state = m.start;
        confs.push_back(c0);
        conf_id.emplace(std::move(c0), 0);
    }
    for (size_t qi = 0; qi < confs.size(); ++qi) {
        const StacklessConfiguration sc = confs[qi];
        if (sc.state == m.final_state) continue;
        for (const MachineTransition& tr : m.delta[size_t(sc.state)]) {
            StacklessConfiguration nx = sc;
            nx.state = tr.next;
            run_hook(m, tr.hook, nx, input);
            if (conf_id.count(nx)) continue;
            if (long(confs.size()) >= budgets.config_cap)
                throw ResourceError("stackless configuration space grew past " +
                                    std::to_string(budgets.config_cap));
            conf_id.emplace(nx, int(confs.size()));
            confs.push_back(std::move(nx));
        }
    }

    struct BlockInfo {
        UniversalBlock block;
        std::vector<int> leaves;
    };
    std::map<int, BlockInfo> block_memo;
    auto block_of = [&](int cid) -> const BlockInfo& {
        auto it = block_memo.find(cid);
        if (it != block_memo.end()) return it->second;
        BlockInfo bi;
        bi.block = universal_block(m, confs[size_t(cid)], input, budgets.config_cap);
        bi.leaves = bi.block.leaves();
        return block_memo.emplace(cid, std::move(bi)).first->second;
    };

    const int nt = t.size();
    if (nt == 1) {
        // a single-node tree asks the whole run to be one universal block:
        // keep the pinned root value only if every branch accepts within the
        // budgets, reading its own pushed word
        bool ok = true;
        const BlockInfo& bi = block_of(0);
        for (int leaf : bi.leaves) {
            std::vector<int> path;
            for (int x = leaf; x != -1; x = bi.block.parent[size_t(x)]) path.push_back(x);
            std::reverse(path.begin(), path.end());
            std::vector<int> word;
            long ucnt = 0;
            for (int nd : path) {
                if (bi.block.push[size_t(nd)] != -1) word.push_back(bi.block.push[size_t(nd)]);
                if (m.kind[size_t(bi.block.node[size_t(nd)].state)] == StateKind::universal)
                    ++ucnt;
            }
            const StacklessConfiguration& lc = bi.block.node[size_t(leaf)];
            long p = lc.state == m.final_state ? tape_number(lc.work) : -1;
            if (lc.state != m.final_state || long(word.size()) > SB || ucnt > B || p < 1 ||
                p > long(word.size()) || word[size_t(p) - 1] != 1) {
                ok = false;
                break;
            }
        }
        RegularReduction out;
        out.instance.n = 1;
        out.instance.domains.push_back(ok ? std::vector<int>{0} : std::vector<int>{});
        out.forest.parent = {-1};
        out.principal = {0};
        out.instance.validate();
        return out;
    }

    TupleSpace space;
    space.nconf = long(confs.size());
    space.nstr = (1L << (W + 1)) - 1;
    space.a = A;
    space.b = B;
    space.sb = SB;
    if (space.total() > budgets.domain_cap)
        throw ResourceError("snapshot domain would hold " + std::to_string(space.total()) +
                            " tuples, cap is " + std::to_string(budgets.domain_cap));

    // subdivide every tree edge: K staged-guess vertices then 2K free-run
    // vertices between parent and child
    std::vector<int> sparent(static_cast<size_t>(nt), -1);
    std::vector<int> principal(static_cast<size_t>(nt));
    for (int v = 0; v < nt; ++v) principal[size_t(v)] = v;
    struct TEdge {
        int u = -1, v = -1, i = -1;
        std::vector<int> s, x;
    };
    std::vector<TEdge> tedges;
    for (int v = 0; v < nt; ++v) {
        if (v == t.root) continue;
        TEdge e;
        e.u = t.parent[size_t(v)];
        e.v = v;
        const auto& sib = t.children[size_t(e.u)];
        e.i = int(std::find(sib.begin(), sib.end(), v) - sib.begin());
        int prev = e.u;
        for (int j = 0; j < 3 * K; ++j) {
            int id = int(sparent.size());
            sparent.push_back(prev);
            principal.push_back(-1);
            (j < K ? e.s : e.x).push_back(id);
            prev = id;
        }
        sparent[size_t(v)] = prev;
        tedges.push_back(std::move(e));
    }
    const int ns = int(sparent.size());

    // a principal leaf value must be final, read a position inside its own
    // stack, and see a 1 wherever the position lands in its recent word
    auto leaf_token_ok = [&](const TupleSpace::Fields& f) -> bool {
        const StacklessConfiguration& sc = confs[size_t(f.c)];
        if (sc.state != m.final_state) return false;
        long p = tape_number(sc.work);
        if (p < 1 || p > f.d) return false;
        std::vector<int> s = pstring_of(f.p);
        long lo = f.d - long(s.size());
        if (p > lo && s[size_t(p - lo - 1)] != 1) return false;
        return true;
    };
    auto token_ok = [&](int v, long tok) -> bool {
        int pv = principal[size_t(v)];
        if (pv < 0) return true;
        TupleSpace::Fields f = space.untok(tok);
        if (pv == t.root) return tok == 0;
        if (t.children[size_t(pv)].empty()) return leaf_token_ok(f);
        return long(block_of(f.c).leaves.size()) == long(t.children[size_t(pv)].size());
    };

    std::vector<std::vector<int>> dom(static_cast<size_t>(ns));
    for (int v = 0; v < ns; ++v) {
        if (principal[size_t(v)] < 0) {
            dom[size_t(v)].resize(static_cast<size_t>(space.total()));
            for (long tk = 0; tk < space.total(); ++tk) dom[size_t(v)][size_t(tk)] = int(tk);
            continue;
        }
        for (long tk = 0; tk < space.total(); ++tk)
            if (token_ok(v, tk)) dom[size_t(v)].push_back(int(tk));
    }
    if (!dom[size_t(t.root)].empty() &&
        long(block_of(0).leaves.size()) != long(t.children[size_t(t.root)].size()))
        dom[size_t(t.root)].clear();

    BinCspInstance inst;
    inst.n = ns;
    inst.domains = dom;

    // staged-guess data along the branch to the i-th block leaf: after j
    // chunks the run sits at the last configuration reached with at most j*W
    // pushes, carrying that chunk's word and the universal count so far
    struct ChunkTable {
        bool usable = false;
        std::vector<int> cj, sj;
        std::vector<long> bj, dj;
    };
    std::map<std::pair<int, int>, ChunkTable> chunk_memo;
    auto chunks = [&](int cid, int i) -> const ChunkTable& {
        auto key = std::make_pair(cid, i);
        auto it = chunk_memo.find(key);
        if (it != chunk_memo.end()) return it->second;
        ChunkTable ct;
        const BlockInfo& bi = block_of(cid);
        if (i < int(bi.leaves.size())) {
            ct.usable = true;
            std::vector<int> path;
            for (int x = bi.leaves[size_t(i)]; x != -1; x = bi.block.parent[size_t(x)])
                path.push_back(x);
            std::reverse(path.begin(), path.end());
            std::vector<int> word;
            std::vector<long> cum(path.size()), ubef(path.size());
            long uc = 0;
            for (size_t a = 0; a < path.size(); ++a) {
                ubef[a] = uc;
                if (bi.block.push[size_t(path[a])] != -1) word.push_back(bi.block.push[size_t(path[a])]);
                cum[a] = long(word.size());
                if (m.kind[size_t(bi.block.node[size_t(path[a])].state)] == StateKind::universal)
                    ++uc;
            }
            long prev = 0;
            size_t a = 0;
            for (int j = 1; j <= K; ++j) {
                while (a + 1 < path.size() && cum[a + 1] <= long(j) * W) ++a;
                ct.cj.push_back(conf_id.at(bi.block.node[size_t(path[a])]));
                std::vector<int> s(word.begin() + prev, word.begin() + cum[a]);
                ct.sj.push_back(pstring_id(s));
                ct.bj.push_back(ubef[a]);
                ct.dj.push_back(cum[a]);
                prev = cum[a];
            }
        }
        return chunk_memo.emplace(key, std::move(ct)).first->second;
    };

    // one free existential run: follow transitions from c, pushing at most W
    // bits and passing at most W existential configurations, stopping before
    // ever stepping out of a universal configuration
    std::map<int, std::vector<std::tuple<int, int, int, int>>> esucc_memo;
    auto esucc = [&](int cid) -> const std::vector<std::tuple<int, int, int, int>>& {
        auto it = esucc_memo.find(cid);
        if (it != esucc_memo.end()) return it->second;
        std::vector<std::tuple<int, int, int, int>> out;  // conf, word id, word length, e count
        std::set<std::tuple<int, std::vector<int>, int>> seen;
        std::vector<std::tuple<int, std::vector<int>, int>> todo;
        todo.emplace_back(cid, std::vector<int>{}, 0);
        seen.insert(todo[0]);
        while (!todo.empty()) {
            auto [c, w, e] = todo.back();
            todo.pop_back();
            out.emplace_back(c, pstring_id(w), int(w.size()), e);
            const StacklessConfiguration& sc = confs[size_t(c)];
            if (sc.state == m.final_state) continue;
            const StateKind k = m.kind[size_t(sc.state)];
            if (k == StateKind::universal) continue;
            int eadd = k == StateKind::existential ? 1 : 0;
            if (e + eadd > W) continue;
            for (const MachineTransition& tr : m.delta[size_t(sc.state)]) {
                if (tr.push != -1 && int(w.size()) >= W) continue;
                std::vector<int> w2 = w;
                if (tr.push != -1) w2.push_back(tr.push);
                StacklessConfiguration nx = sc;
                nx.state = tr.next;
                run_hook(m, tr.hook, nx, input);
                auto key = std::make_tuple(conf_id.at(nx), std::move(w2), e + eadd);
                if (seen.insert(key).second) {
                    if (long(seen.size()) > 200'000)
                        throw ResourceError("free run exploration grew past 200000 states");
                    todo.push_back(std::move(key));
                }
            }
        }
        return esucc_memo.emplace(cid, std::move(out)).first->second;
    };

    for (const TEdge& te : tedges) {
        std::vector<std::vector<std::pair<int, int>>> cpairs(static_cast<size_t>(K));
        for (int q : dom[size_t(te.u)]) {
            TupleSpace::Fields f = space.untok(q);
            const ChunkTable& ct = chunks(f.c, te.i);
            if (!ct.usable) continue;
            for (int j = 0; j < K; ++j) {
                long u2 = f.u + ct.bj[size_t(j)];
                long d2 = f.d + ct.dj[size_t(j)];
                if (u2 > B || d2 > SB) break;
                cpairs[size_t(j)].emplace_back(
                    q, int(space.tok(ct.cj[size_t(j)], ct.sj[size_t(j)], f.e, u2, d2)));
            }
        }
        for (int j = 0; j < K; ++j)
            inst.add_constraint(te.u, te.s[size_t(j)], std::move(cpairs[size_t(j)]));

        std::vector<int> chain;
        chain.push_back(te.s.back());
        for (int x : te.x) chain.push_back(x);
        chain.push_back(te.v);
        for (size_t st = 0; st + 1 < chain.size(); ++st) {
            int src = chain[st], dst = chain[st + 1];
            std::vector<std::pair<int, int>> pairs;
            for (int q : dom[size_t(src)]) {
                TupleSpace::Fields f = space.untok(q);
                for (const auto& [c2, wid, wlen, ea] : esucc(f.c)) {
                    long e2 = f.e + ea;
                    long d2 = f.d + wlen;
                    if (e2 > A || d2 > SB) continue;
                    long tok2 = space.tok(c2, wid, e2, f.u, d2);
                    if (!token_ok(dst, tok2)) continue;
                    pairs.emplace_back(q, int(tok2));
                }
            }
            inst.add_constraint(src, dst, std::move(pairs));
        }
    }

    // every vertex on the way to a leaf answers for the stack chunk it
    // carried: the read position must miss its window or see a 1 there
    for (int leaf = 0; leaf < nt; ++leaf) {
        if (leaf == t.root || !t.children[size_t(leaf)].empty()) continue;
        std::vector<long> reads;
        for (int ql : dom[size_t(leaf)])
            reads.push_back(tape_number(confs[size_t(space.untok(ql).c)].work));
        for (int w = sparent[size_t(leaf)]; w != -1; w = sparent[size_t(w)]) {
            std::vector<std::pair<int, int>> pairs;
            for (int qw : dom[size_t(w)]) {
                TupleSpace::Fields fw = space.untok(qw);
                std::vector<int> s = pstring_of(fw.p);
                long lo = fw.d - long(s.size());
                for (size_t li = 0; li < reads.size(); ++li) {
                    long p = reads[li];
                    if (p > lo && p <= fw.d && s[size_t(p - lo - 1)] != 1) continue;
                    pairs.emplace_back(qw, dom[size_t(leaf)][li]);
                }
            }
            if (inst.has_edge(w, leaf))
                inst.intersect_constraint(w, leaf, std::move(pairs));
            else
                inst.add_constraint(w, leaf, std::move(pairs));
        }
    }

    RegularReduction out;
    out.instance = std::move(inst);
    out.forest.parent = std::move(sparent);
    out.principal = std::move(principal);
    out.instance.validate();
    return out;
}

ArosMachine parse_arosm(const std::string& text,
                        const std::map<std::string, MacroUpdate>& hook_table) {
    std::istringstream in(text);
    std::string line;
    ArosMachine m;
    m.hooks = hook_table;
    int n = -1;
    std::vector<bool> declared;
    std::vector<std::vector<std::pair<int, MachineTransition>>> raw;  // (branch, transition)
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> InputError {
        return InputError("arosm line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "arosm") {
            if (n >= 0) throw fail("duplicate header");
            if (!(ls >> n) || n <= 0) throw fail("header needs a positive state count");
            m.kind.assign(static_cast<size_t>(n), StateKind::deterministic);
            m.delta.assign(static_cast<size_t>(n), {});
            declared.assign(static_cast<size_t>(n), false);
            raw.assign(static_cast<size_t>(n), {});
            continue;
        }
        if (n < 0) throw fail("file must start with an arosm header");
        if (word == "start") {
            if (!(ls >> m.start)) throw fail("start needs a state id");
            continue;
        }
        if (word == "state") {
            int id = -1;
            std::string kd;
            if (!(ls >> id >> kd)) throw fail("state needs an id and a kind");
            if (id < 0 || id >= n) throw fail("state id out of range");
            if (declared[size_t(id)]) throw fail("state declared twice");
            declared[size_t(id)] = true;
            if (kd == "E")
                m.kind[size_t(id)] = StateKind::existential;
            else if (kd == "U")
                m.kind[size_t(id)] = StateKind::universal;
            else if (kd == "D")
                m.kind[size_t(id)] = StateKind::deterministic;
            else
                throw fail("state kind must be E, U or D");
            std::string tag;
            if (ls >> tag) {
                if (tag != "final") throw fail("unexpected token " + tag);
                if (m.final_state >= 0) throw fail("second final state");
                m.final_state = id;
            }
            continue;
        }
        if (word == "trans") {
            int id = -1, next = -1;
            std::string br, ps;
            if (!(ls >> id >> br >> next >> ps)) throw fail("trans needs state, branch, next, push");
            if (id < 0 || id >= n) throw fail("transition state out of range");
            int branch;
            if (br == "-")
                branch = -1;
            else if (br == "0" || br == "1")
                branch = br[0] - '0';
            else
                throw fail("branch must be -, 0 or 1");
            MachineTransition tr;
            tr.next = next;
            if (ps == "-")
                tr.push = -1;
            else if (ps == "0" || ps == "1")
                tr.push = ps[0] - '0';
            else
                throw fail("push must be -, 0 or 1");
            ls >> tr.hook;
            raw[size_t(id)].emplace_back(branch, std::move(tr));
            continue;
        }
        throw fail("unknown directive " + word);
    }
    if (n < 0) throw InputError("arosm header missing");
    for (int s = 0; s < n; ++s) {
        if (!declared[size_t(s)]) throw InputError("state " + std::to_string(s) + " not declared");
        auto& rs = raw[size_t(s)];
        if (m.kind[size_t(s)] == StateKind::deterministic) {
            for (auto& [br, tr] : rs) {
                if (br != -1) throw InputError("deterministic state " + std::to_string(s) +
                                               " cannot have a branch bit");
                m.delta[size_t(s)].push_back(std::move(tr));
            }
            continue;
        }
        m.delta[size_t(s)].resize(2);
        std::array<bool, 2> got{false, false};
        for (auto& [br, tr] : rs) {
            if (br != 0 && br != 1)
                throw InputError("alternating state " + std::to_string(s) + " needs branch bits");
            if (got[size_t(br)])
                throw InputError("state " + std::to_string(s) + " has two " +
                                 std::to_string(br) + "-transitions");
            got[size_t(br)] = true;
            m.delta[size_t(s)][size_t(br)] = std::move(tr);
        }
        if (!got[0] || !got[1])
            throw InputError("state " + std::to_string(s) + " needs both branch transitions");
    }
    m.validate();
    return m;
}

std::string write_arosm(const ArosMachine& m) {
    std::ostringstream out;
    out << "arosm " << m.kind.size() << "\n";
    out << "start " << m.start << "\n";
    for (size_t s = 0; s < m.kind.size(); ++s) {
        char k = m.kind[s] == StateKind::existential ? 'E'
                 : m.kind[s] == StateKind::universal ? 'U'
                                                     : 'D';
        out << "state " << s << " " << k;
        if (int(s) == m.final_state) out << " final";
        out << "\n";
    }
    for (size_t s = 0; s < m.delta.size(); ++s) {
        for (size_t i = 0; i < m.delta[s].size(); ++i) {
            const MachineTransition& tr = m.delta[s][i];
            out << "trans " << s << " ";
            if (m.kind[s] == StateKind::deterministic)
                out << "-";
            else
                out << i;
            out << " " << tr.next << " ";
            if (tr.push == -1)
                out << "-";
            else
                out << tr.push;
            if (!tr.hook.empty()) out << " " << tr.hook;
            out << "\n";
        }
    }
    return out.str();
}

} // namespace csplab
