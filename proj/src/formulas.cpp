#include "csplab/formulas.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "csplab/rng.hpp"
#include "csplab/textio.hpp"

namespace csplab {

namespace {

int add_gate(NormalizedFormula& f, NormalizedFormula::Kind kind, std::vector<int> children) {
    for (int c : children)
        if (c < 0 || c >= int(f.nodes.size())) throw InputError("gate child out of range");
    NormalizedFormula::Node n;
    n.kind = kind;
    n.children = std::move(children);
    f.nodes.push_back(std::move(n));
    return int(f.nodes.size()) - 1;
}

} // namespace

int NormalizedFormula::add_and(std::vector<int> children) {
    return add_gate(*this, Kind::And, std::move(children));
}

int NormalizedFormula::add_or(std::vector<int> children) {
    return add_gate(*this, Kind::Or, std::move(children));
}

int NormalizedFormula::add_lit(int var, bool positive) {
    if (var < 0) throw InputError("negative literal variable");
    Node n;
    n.kind = Kind::Lit;
    n.var = var;
    n.positive = positive;
    nodes.push_back(std::move(n));
    return int(nodes.size()) - 1;
}

namespace {

struct LevelScan {
    const NormalizedFormula& f;
    int max_gate_depth = 0;
    int max_lit_depth = 0;

    void walk(int idx, int depth) {
        if (idx < 0 || idx >= int(f.nodes.size())) throw InputError("node index out of range");
        if (depth > int(f.nodes.size()) + 1) throw InputError("formula nodes form a cycle");
        const auto& n = f.nodes[size_t(idx)];
        if (n.kind == NormalizedFormula::Kind::Lit) {
            if (n.var < 0 || n.var >= f.num_vars)
                throw InputError("literal variable out of range");
            max_lit_depth = std::max(max_lit_depth, depth);
            return;
        }
        bool want_and = depth % 2 == 1;
        if ((n.kind == NormalizedFormula::Kind::And) != want_and)
            throw InputError(std::string("level ") + std::to_string(depth) + " must hold " +
                             (want_and ? "AND" : "OR") + " gates");
        max_gate_depth = std::max(max_gate_depth, depth);
        for (int c : n.children) walk(c, depth + 1);
    }
};

} // namespace

int normalization_level(const NormalizedFormula& f) {
    if (f.root < 0 || f.root >= int(f.nodes.size())) throw InputError("missing formula root");
    if (f.nodes[size_t(f.root)].kind != NormalizedFormula::Kind::And)
        throw InputError("formula root must be an AND");
    LevelScan scan{f};
    scan.walk(f.root, 1);
    return std::max({2, scan.max_gate_depth, scan.max_lit_depth - 1});
}

namespace {

bool eval_node(const NormalizedFormula& f, int idx, const std::vector<bool>& truth, int guard) {
    if (idx < 0 || idx >= int(f.nodes.size())) throw InputError("node index out of range");
    if (guard > int(f.nodes.size()) + 1) throw InputError("formula nodes form a cycle");
    const auto& n = f.nodes[size_t(idx)];
    switch (n.kind) {
        case NormalizedFormula::Kind::Lit:
            if (n.var < 0 || n.var >= int(truth.size()))
                throw InputError("literal variable out of range");
            return truth[size_t(n.var)] == n.positive;
        case NormalizedFormula::Kind::And:
            for (int c : n.children)
                if (!eval_node(f, c, truth, guard + 1)) return false;
            return true;
        case NormalizedFormula::Kind::Or:
            for (int c : n.children)
                if (eval_node(f, c, truth, guard + 1)) return true;
            return false;
    }
    throw InputError("corrupt formula node");
}

} // namespace

bool eval_formula(const NormalizedFormula& f, const std::vector<bool>& truth) {
    if (int(truth.size()) != f.num_vars)
        throw InputError("assignment must cover all " + std::to_string(f.num_vars) +
                         " variables");
    if (f.root < 0 || f.root >= int(f.nodes.size())) throw InputError("missing formula root");
    return eval_node(f, f.root, truth, 1);
}

namespace {

bool all_literals(const NormalizedFormula& f, int idx, bool positive, int guard) {
    if (idx < 0 || idx >= int(f.nodes.size())) throw InputError("node index out of range");
    if (guard > int(f.nodes.size()) + 1) throw InputError("formula nodes form a cycle");
    const auto& n = f.nodes[size_t(idx)];
    if (n.kind == NormalizedFormula::Kind::Lit) return n.positive == positive;
    for (int c : n.children)
        if (!all_literals(f, c, positive, guard + 1)) return false;
    return true;
}

} // namespace

bool is_antimonotone(const NormalizedFormula& f) { return all_literals(f, f.root, false, 1); }
bool is_monotone(const NormalizedFormula& f) { return all_literals(f, f.root, true, 1); }

namespace {

int pad_copy(const NormalizedFormula& src, NormalizedFormula& dst, int idx, int depth, int t) {
    const auto& n = src.nodes[size_t(idx)];
    if (n.kind == NormalizedFormula::Kind::Lit) {
        int out = dst.add_lit(n.var, n.positive);
        for (int d = t; d >= depth; --d)
            out = d % 2 == 1 ? dst.add_and({out}) : dst.add_or({out});
        return out;
    }
    std::vector<int> children;
    children.reserve(n.children.size());
    for (int c : n.children) children.push_back(pad_copy(src, dst, c, depth + 1, t));
    return n.kind == NormalizedFormula::Kind::And ? dst.add_and(std::move(children))
                                                  : dst.add_or(std::move(children));
}

} // namespace

NormalizedFormula pad_to_level(const NormalizedFormula& f, int t) {
    int cur = normalization_level(f);
    if (t < cur) throw InputError("cannot pad a level-" + std::to_string(cur) +
                                  " formula down to " + std::to_string(t));
    NormalizedFormula out;
    out.num_vars = f.num_vars;
    out.root = pad_copy(f, out, f.root, 1, t);
    return out;
}

namespace {

int random_subtree(NormalizedFormula& f, Rng& rng, int depth, int t, int max_width, int sign) {
    if (depth == t + 1) {
        bool positive = sign > 0 || (sign == 0 && rng.chance(0.5));
        return f.add_lit(int(rng.below(uint64_t(f.num_vars))), positive);
    }
    int width = rng.range(1, max_width);
    std::vector<int> children;
    for (int i = 0; i < width; ++i)
        children.push_back(random_subtree(f, rng, depth + 1, t, max_width, sign));
    return depth % 2 == 1 ? f.add_and(std::move(children)) : f.add_or(std::move(children));
}

} // namespace

NormalizedFormula random_normalized_formula(int t, int num_vars, int max_width, uint64_t seed,
                                            int sign) {
    if (t < 2 || num_vars < 1 || max_width < 1)
        throw InputError("random formula needs t >= 2, num_vars >= 1, max_width >= 1");
    Rng rng(seed);
    NormalizedFormula f;
    f.num_vars = num_vars;
    f.root = random_subtree(f, rng, 1, t, max_width, sign);
    return f;
}

namespace {

// Colexicographic enumeration of k-subsets of {0..n-1}; the first subset
// passing `accept` wins. Throws ResourceError when binom(n,k) > cap.
template <class Accept>
std::optional<std::vector<int>> first_colex_subset(int n, int k, long cap, const Accept& accept) {
    if (k < 0 || k > n) return std::nullopt;
    __int128 total = 1;
    for (int i = 1; i <= k; ++i) {
        total = total * (n - k + i) / i;
        if (total > cap)
            throw ResourceError("subset enumeration needs more than " + std::to_string(cap) +
                                " candidates");
    }
    std::vector<int> s(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) s[size_t(i)] = i;
    while (true) {
        if (accept(s)) return s;
        int i = 0;
        while (i < k) {
            int limit = i + 1 < k ? s[size_t(i) + 1] : n;
            if (s[size_t(i)] + 1 < limit) break;
            ++i;
        }
        if (i == k) return std::nullopt;
        ++s[size_t(i)];
        for (int j = 0; j < i; ++j) s[size_t(j)] = j;
    }
}

std::vector<bool> subset_to_truth(int n, const std::vector<int>& subset) {
    std::vector<bool> truth(size_t(n), false);
    for (int v : subset) truth[size_t(v)] = true;
    return truth;
}

} // namespace

std::optional<std::vector<int>> weighted_sat_bruteforce(const WeightedSatInstance& w, long cap) {
    if (w.k < 0) throw InputError("negative weight");
    normalization_level(w.formula);  // shape and range checks
    return first_colex_subset(w.formula.num_vars, w.k, cap, [&](const std::vector<int>& s) {
        return eval_formula(w.formula, subset_to_truth(w.formula.num_vars, s));
    });
}

namespace {

int add_circuit_gate(BooleanCircuit& c, BooleanCircuit::Kind kind, int var,
                     std::vector<int> inputs) {
    for (int g : inputs)
        if (g < 0 || g >= int(c.gates.size())) throw InputError("gate input out of range");
    BooleanCircuit::Gate gate;
    gate.kind = kind;
    gate.var = var;
    gate.inputs = std::move(inputs);
    c.gates.push_back(std::move(gate));
    return int(c.gates.size()) - 1;
}

} // namespace

int BooleanCircuit::add_input(int var) {
    if (var < 0) throw InputError("negative input variable");
    num_vars = std::max(num_vars, var + 1);
    return add_circuit_gate(*this, Kind::Input, var, {});
}

int BooleanCircuit::add_and(std::vector<int> inputs) {
    return add_circuit_gate(*this, Kind::And, -1, std::move(inputs));
}

int BooleanCircuit::add_or(std::vector<int> inputs) {
    return add_circuit_gate(*this, Kind::Or, -1, std::move(inputs));
}

int BooleanCircuit::add_not(int input) {
    return add_circuit_gate(*this, Kind::Not, -1, {input});
}

void BooleanCircuit::validate() const {
    if (output < 0 || output >= int(gates.size())) throw InputError("missing output gate");
    for (const auto& g : gates) {
        for (int i : g.inputs)
            if (i < 0 || i >= int(gates.size()))
                throw InputError("gate references missing gate " + std::to_string(i));
        if (g.kind == Kind::Input) {
            if (!g.inputs.empty()) throw InputError("input gate cannot have gate inputs");
            if (g.var < 0 || g.var >= num_vars) throw InputError("input variable out of range");
        } else if (g.var != -1) {
            throw InputError("only input gates carry a variable");
        }
        if (g.kind == Kind::Not && g.inputs.size() != 1)
            throw InputError("NOT gate needs exactly one input");
    }
    // 0 unseen, 1 on stack, 2 done
    std::vector<char> state(gates.size(), 0);
    std::vector<std::pair<int, size_t>> stack;
    for (int start = 0; start < int(gates.size()); ++start) {
        if (state[size_t(start)]) continue;
        stack.emplace_back(start, 0);
        state[size_t(start)] = 1;
        while (!stack.empty()) {
            auto& [g, next] = stack.back();
            if (next == gates[size_t(g)].inputs.size()) {
                state[size_t(g)] = 2;
                stack.pop_back();
                continue;
            }
            int child = gates[size_t(g)].inputs[next++];
            if (state[size_t(child)] == 1) throw InputError("circuit contains a cycle");
            if (state[size_t(child)] == 0) {
                state[size_t(child)] = 1;
                stack.emplace_back(child, 0);
            }
        }
    }
}

namespace {

// Caller has run validate(), so the gate graph is known acyclic.
bool eval_circuit_unchecked(const BooleanCircuit& c, const std::vector<bool>& truth) {
    std::vector<char> known(c.gates.size(), 0);
    std::vector<char> value(c.gates.size(), 0);
    auto eval = [&](auto&& self, int g) -> bool {
        if (known[size_t(g)]) return value[size_t(g)];
        const auto& gate = c.gates[size_t(g)];
        bool out = false;
        switch (gate.kind) {
            case BooleanCircuit::Kind::Input: out = truth[size_t(gate.var)]; break;
            case BooleanCircuit::Kind::Not: out = !self(self, gate.inputs[0]); break;
            case BooleanCircuit::Kind::And:
                out = true;
                for (int i : gate.inputs) out = self(self, i) && out;
                break;
            case BooleanCircuit::Kind::Or:
                out = false;
                for (int i : gate.inputs) out = self(self, i) || out;
                break;
        }
        known[size_t(g)] = 1;
        value[size_t(g)] = out;
        return out;
    };
    return eval(eval, c.output);
}

} // namespace

bool eval_circuit(const BooleanCircuit& c, const std::vector<bool>& truth) {
    if (int(truth.size()) != c.num_vars)
        throw InputError("assignment must cover all " + std::to_string(c.num_vars) +
                         " variables");
    c.validate();
    return eval_circuit_unchecked(c, truth);
}

std::optional<std::vector<int>> weighted_circuit_sat_bruteforce(const BooleanCircuit& c, int k,
                                                                long cap) {
    if (k < 0) throw InputError("negative weight");
    c.validate();
    return first_colex_subset(c.num_vars, k, cap, [&](const std::vector<int>& s) {
        return eval_circuit_unchecked(c, subset_to_truth(c.num_vars, s));
    });
}

BooleanCircuit formula_to_circuit(const NormalizedFormula& f) {
    normalization_level(f);
    BooleanCircuit c;
    c.num_vars = f.num_vars;
    std::vector<int> in(size_t(f.num_vars)), neg(size_t(f.num_vars), -1);
    for (int v = 0; v < f.num_vars; ++v) in[size_t(v)] = c.add_input(v);
    auto build = [&](auto&& self, int idx) -> int {
        const auto& n = f.nodes[size_t(idx)];
        if (n.kind == NormalizedFormula::Kind::Lit) {
            if (n.positive) return in[size_t(n.var)];
            if (neg[size_t(n.var)] < 0) neg[size_t(n.var)] = c.add_not(in[size_t(n.var)]);
            return neg[size_t(n.var)];
        }
        std::vector<int> inputs;
        inputs.reserve(n.children.size());
        for (int ch : n.children) inputs.push_back(self(self, ch));
        return n.kind == NormalizedFormula::Kind::And ? c.add_and(std::move(inputs))
                                                      : c.add_or(std::move(inputs));
    };
    c.output = build(build, f.root);
    return c;
}

namespace {

struct SexprToken {
    std::string text;
    int line = 0;
};

std::vector<SexprToken> lex_sexpr(const std::string& text) {
    std::vector<SexprToken> out;
    int line = 1;
    size_t i = 0;
    while (i < text.size()) {
        char ch = text[i];
        if (ch == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
        } else if (ch == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (ch == '(' || ch == ')') {
            out.push_back({std::string(1, ch), line});
            ++i;
        } else {
            size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '(' && text[j] != ')' && text[j] != '#')
                ++j;
            out.push_back({text.substr(i, j - i), line});
            i = j;
        }
    }
    return out;
}

struct SexprCursor {
    const std::vector<SexprToken>& tokens;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        int line = pos < tokens.size() ? tokens[pos].line
                   : tokens.empty()    ? 1
                                       : tokens.back().line;
        throw InputError("line " + std::to_string(line) + ": " + msg);
    }
    const SexprToken& peek() const {
        if (pos >= tokens.size()) fail("unexpected end of input");
        return tokens[pos];
    }
    std::string next() {
        std::string t = peek().text;
        ++pos;
        return t;
    }
    void expect(const std::string& what) {
        if (peek().text != what) fail("expected '" + what + "', got '" + peek().text + "'");
        ++pos;
    }
    int next_int(const std::string& what) {
        std::string t = peek().text;
        try {
            size_t used = 0;
            int v = std::stoi(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            ++pos;
            return v;
        } catch (const std::exception&) {
            fail("expected " + what + ", got '" + t + "'");
        }
    }
};

int parse_formula_sexpr(SexprCursor& cur, NormalizedFormula& f) {
    if (cur.peek().text != "(") {
        int var = cur.next_int("a literal variable");
        return f.add_lit(var, true);
    }
    cur.expect("(");
    std::string head = cur.next();
    if (head == "not") {
        int var = cur.next_int("a literal variable");
        cur.expect(")");
        return f.add_lit(var, false);
    }
    if (head != "and" && head != "or") cur.fail("expected and, or, or not, got '" + head + "'");
    std::vector<int> children;
    while (cur.peek().text != ")") children.push_back(parse_formula_sexpr(cur, f));
    cur.expect(")");
    return head == "and" ? f.add_and(std::move(children)) : f.add_or(std::move(children));
}

void write_formula_sexpr(const NormalizedFormula& f, int idx, std::ostringstream& out) {
    const auto& n = f.nodes[size_t(idx)];
    if (n.kind == NormalizedFormula::Kind::Lit) {
        if (n.positive)
            out << n.var;
        else
            out << "(not " << n.var << ")";
        return;
    }
    out << (n.kind == NormalizedFormula::Kind::And ? "(and" : "(or");
    for (int c : n.children) {
        out << " ";
        write_formula_sexpr(f, c, out);
    }
    out << ")";
}

} // namespace

WeightedSatInstance parse_wsat(const std::string& text) {
    auto tokens = lex_sexpr(text);
    SexprCursor cur{tokens};
    cur.expect("(");
    cur.expect("wsat");
    WeightedSatInstance w;
    int k = 0, n = 0;
    bool have_k = false, have_n = false;
    for (int i = 0; i < 2; ++i) {
        std::string key = cur.next();
        if (key == ":k" && !have_k) {
            k = cur.next_int("a weight");
            have_k = true;
        } else if (key == ":n" && !have_n) {
            n = cur.next_int("a variable count");
            have_n = true;
        } else {
            cur.fail("expected :k and :n once each");
        }
    }
    if (k < 0 || n < 0) cur.fail(":k and :n must be nonnegative");
    w.k = k;
    w.formula.num_vars = n;
    w.formula.root = parse_formula_sexpr(cur, w.formula);
    cur.expect(")");
    if (cur.pos != tokens.size()) cur.fail("trailing content after the instance");
    try {
        normalization_level(w.formula);
    } catch (const InputError& e) {
        throw InputError(std::string("malformed formula: ") + e.what());
    }
    return w;
}

std::string write_wsat(const WeightedSatInstance& w) {
    std::ostringstream out;
    out << "(wsat :k " << w.k << " :n " << w.formula.num_vars << " ";
    write_formula_sexpr(w.formula, w.formula.root, out);
    out << ")\n";
    return out.str();
}

namespace {

int parse_tagged(const Line& l, size_t i, char tag, const std::string& what) {
    const std::string& t = l.tok(i, what);
    if (t.size() < 2 || t[0] != tag) l.fail("expected " + what + ", got '" + t + "'");
    for (size_t j = 1; j < t.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(t[j])))
            l.fail("expected " + what + ", got '" + t + "'");
    try {
        return std::stoi(t.substr(1));
    } catch (const std::exception&) {
        l.fail("number out of range in '" + t + "'");
    }
}

} // namespace

BooleanCircuit parse_circuit(const std::string& text) {
    auto lines = tokenize_text(text);
    if (lines.empty()) throw InputError("empty circuit file");
    BooleanCircuit c;
    int out_gate = -1;
    std::vector<std::pair<int, BooleanCircuit::Gate>> parsed;
    for (const Line& l : lines) {
        if (l.tokens[0] == "out") {
            if (out_gate >= 0) l.fail("second out line");
            out_gate = parse_tagged(l, 1, 'g', "a gate name g<id>");
            continue;
        }
        if (out_gate >= 0) l.fail("out must be the final line");
        int id = parse_tagged(l, 0, 'g', "a gate name g<id>");
        if (l.tok(1, "'='") != "=") l.fail("expected '='");
        const std::string& kind = l.tok(2, "a gate kind");
        BooleanCircuit::Gate g;
        if (kind == "IN") {
            g.kind = BooleanCircuit::Kind::Input;
            g.var = parse_tagged(l, 3, 'x', "a variable x<j>");
            if (l.tokens.size() > 4) l.fail("IN takes one variable");
        } else if (kind == "AND" || kind == "OR" || kind == "NOT") {
            g.kind = kind == "AND"  ? BooleanCircuit::Kind::And
                     : kind == "OR" ? BooleanCircuit::Kind::Or
                                    : BooleanCircuit::Kind::Not;
            for (size_t i = 3; i < l.tokens.size(); ++i)
                g.inputs.push_back(parse_tagged(l, i, 'g', "a gate name g<id>"));
            if (g.kind == BooleanCircuit::Kind::Not && g.inputs.size() != 1)
                l.fail("NOT takes exactly one gate");
        } else {
            l.fail("unknown gate kind '" + kind + "'");
        }
        parsed.emplace_back(id, std::move(g));
    }
    if (out_gate < 0) throw InputError("missing out line");
    c.gates.resize(parsed.size());
    std::vector<char> defined(parsed.size(), 0);
    for (auto& [id, g] : parsed) {
        if (id < 0 || id >= int(parsed.size()))
            throw InputError("gate ids must cover 0.." + std::to_string(parsed.size() - 1) +
                             ", got g" + std::to_string(id));
        if (defined[size_t(id)]) throw InputError("gate g" + std::to_string(id) + " defined twice");
        defined[size_t(id)] = 1;
        if (g.kind == BooleanCircuit::Kind::Input) c.num_vars = std::max(c.num_vars, g.var + 1);
        c.gates[size_t(id)] = std::move(g);
    }
    c.output = out_gate;
    c.validate();
    return c;
}

std::string write_circuit(const BooleanCircuit& c) {
    std::ostringstream out;
    for (size_t i = 0; i < c.gates.size(); ++i) {
        const auto& g = c.gates[i];
        out << "g" << i << " = ";
        switch (g.kind) {
            case BooleanCircuit::Kind::Input: out << "IN x" << g.var; break;
            case BooleanCircuit::Kind::And: out << "AND"; break;
            case BooleanCircuit::Kind::Or: out << "OR"; break;
            case BooleanCircuit::Kind::Not: out << "NOT"; break;
        }
        if (g.kind != BooleanCircuit::Kind::Input)
            for (int in : g.inputs) out << " g" << in;
        out << "\n";
    }
    out << "out g" << c.output << "\n";
    return out.str();
}

} // namespace csplab
