#include <algorithm>
#include <bit>

#include "csplab/formulas.hpp"
#include "csplab/rng.hpp"
#include "doctest.h"

using namespace csplab;
using Kind = NormalizedFormula::Kind;

namespace {

// Small builder: wires a nested description into a NormalizedFormula.
struct FB {
    NormalizedFormula f;
    int lit(int var, bool pos = true) { return f.add_lit(var, pos); }
    int band(std::vector<int> ch) { return f.add_and(std::move(ch)); }
    int bor(std::vector<int> ch) { return f.add_or(std::move(ch)); }
    NormalizedFormula done(int root, int n) {
        f.root = root;
        f.num_vars = n;
        return f;
    }
};

std::vector<bool> truth_of(uint32_t mask, int n) {
    std::vector<bool> t(size_t(n), false);
    for (int i = 0; i < n; ++i)
        if (mask >> i & 1) t[size_t(i)] = true;
    return t;
}

} // namespace

TEST_CASE("evaluation of degenerate and small gates") {
    FB a;
    CHECK(eval_formula(a.done(a.band({}), 0), {}));  // empty conjunction
    FB o;
    NormalizedFormula f = o.done(o.band({o.bor({})}), 0);  // empty disjunction inside
    CHECK(!eval_formula(f, {}));

    FB b;
    NormalizedFormula g =
        b.done(b.band({b.bor({b.lit(0, false)}), b.bor({b.lit(1, false)})}), 2);
    CHECK(!eval_formula(g, truth_of(0b01, 2)));
    CHECK(eval_formula(g, truth_of(0b00, 2)));
    CHECK_THROWS_AS(eval_formula(g, {true}), InputError);
}

TEST_CASE("normalization level and alternation checks") {
    FB a;
    CHECK(normalization_level(a.done(a.band({a.bor({a.lit(0)})}), 1)) == 2);
    FB b;
    CHECK(normalization_level(b.done(b.band({b.bor({b.band({b.lit(0)})})}), 1)) == 3);
    FB c;
    CHECK(normalization_level(c.done(c.band({}), 0)) == 2);
    FB d;  // bare literal under the root still counts as level 2
    CHECK(normalization_level(d.done(d.band({d.lit(0)}), 1)) == 2);
    FB e;  // literals at mixed depths: level follows the deepest
    NormalizedFormula mixed = e.done(
        e.band({e.bor({e.lit(0, false)}), e.bor({e.band({e.lit(1, false)})})}), 2);
    CHECK(normalization_level(mixed) == 3);

    FB r;  // OR root
    CHECK_THROWS_AS(normalization_level(r.done(r.bor({r.lit(0)}), 1)), InputError);
    FB s;  // AND under AND
    CHECK_THROWS_AS(normalization_level(s.done(s.band({s.band({s.lit(0)})}), 1)), InputError);
    FB t;  // literal variable beyond num_vars
    CHECK_THROWS_AS(normalization_level(t.done(t.band({t.lit(3)}), 2)), InputError);
}

TEST_CASE("monotonicity flags") {
    FB a;
    NormalizedFormula anti = a.done(a.band({a.bor({a.lit(0, false)})}), 1);
    CHECK(is_antimonotone(anti));
    CHECK(!is_monotone(anti));
    FB b;
    NormalizedFormula mono = b.done(b.band({b.bor({b.lit(0)})}), 1);
    CHECK(!is_antimonotone(mono));
    CHECK(is_monotone(mono));
    FB c;
    NormalizedFormula both = c.done(c.band({c.bor({c.lit(0), c.lit(1, false)})}), 2);
    CHECK(!is_antimonotone(both));
    CHECK(!is_monotone(both));
}

TEST_CASE("weighted satisfiability witnesses come in colex order") {
    FB a;
    WeightedSatInstance empty{a.done(a.band({}), 0), 0, {}};
    auto w0 = weighted_sat_bruteforce(empty);
    REQUIRE(w0.has_value());
    CHECK(w0->empty());

    FB b;
    WeightedSatInstance pick{b.done(b.band({b.bor({b.lit(0), b.lit(1)})}), 2), 1, {}};
    auto w1 = weighted_sat_bruteforce(pick);
    REQUIRE(w1.has_value());
    CHECK(*w1 == std::vector<int>{0});

    FB c;  // forcing x0 false but k = n leaves nothing
    WeightedSatInstance anti{c.done(c.band({c.bor({c.lit(0, false)})}), 2), 2, {}};
    CHECK(!weighted_sat_bruteforce(anti).has_value());

    FB d;
    WeightedSatInstance big{d.done(d.band({d.bor({d.lit(0)})}), 30), 15, {}};
    CHECK_THROWS_AS(weighted_sat_bruteforce(big, 1000), ResourceError);
}

TEST_CASE("random formulas match a full-assignment evaluator") {
    for (uint64_t seed = 1; seed <= 40; ++seed) {
        Rng pick(seed * 7919);
        int n = int(pick.range(2, 12));
        NormalizedFormula f = random_normalized_formula(3, n, 3, seed);
        CHECK(normalization_level(f) == 3);
        int k = int(pick.range(0, n));

        std::optional<std::vector<int>> expect;
        for (uint32_t mask = 0; mask < (1u << n) && !expect; ++mask) {
            if (std::popcount(mask) != k) continue;
            if (eval_formula(f, truth_of(mask, n))) {
                std::vector<int> s;
                for (int i = 0; i < n; ++i)
                    if (mask >> i & 1) s.push_back(i);
                expect = s;
            }
        }
        CHECK(weighted_sat_bruteforce({f, k, {}}) == expect);
    }
}

TEST_CASE("padding pushes literals to a uniform depth without changing meaning") {
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        NormalizedFormula f = random_normalized_formula(2, 4, 3, seed, -1);
        NormalizedFormula padded = pad_to_level(f, 5);
        CHECK(normalization_level(padded) == 5);
        CHECK(is_antimonotone(padded));
        for (uint32_t mask = 0; mask < 16; ++mask)
            CHECK(eval_formula(f, truth_of(mask, 4)) == eval_formula(padded, truth_of(mask, 4)));
        CHECK_THROWS_AS(pad_to_level(padded, 3), InputError);
    }
    FB a;  // no literals: returned unchanged
    NormalizedFormula empty = a.done(a.band({a.bor({})}), 0);
    CHECK(normalization_level(pad_to_level(empty, 6)) == 2);
}

TEST_CASE("circuit evaluation and validation") {
    BooleanCircuit c;
    int x0 = c.add_input(0);
    c.output = x0;
    CHECK(eval_circuit(c, {true}));
    CHECK(!eval_circuit(c, {false}));

    BooleanCircuit d;
    d.output = d.add_not(d.add_input(0));
    CHECK(eval_circuit(d, {false}));

    BooleanCircuit e;
    int a = e.add_input(0), b = e.add_input(1), z = e.add_input(2);
    e.output = e.add_and({e.add_or({a, b}), e.add_not(z)});
    CHECK(eval_circuit(e, {false, true, false}));
    CHECK(!eval_circuit(e, {false, true, true}));

    BooleanCircuit bad;  // manual cycle, caught by validate
    bad.gates.resize(2);
    bad.gates[0].kind = BooleanCircuit::Kind::Not;
    bad.gates[0].inputs = {1};
    bad.gates[1].kind = BooleanCircuit::Kind::Not;
    bad.gates[1].inputs = {0};
    bad.output = 0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    CHECK_THROWS_AS(eval_circuit(bad, {}), InputError);
}

TEST_CASE("weighted circuit satisfiability") {
    BooleanCircuit always;
    always.output = always.add_and({});
    always.num_vars = 4;
    auto w = weighted_circuit_sat_bruteforce(always, 2);
    REQUIRE(w.has_value());
    CHECK(*w == std::vector<int>{0, 1});

    BooleanCircuit one;
    one.output = one.add_input(0);
    one.num_vars = 2;
    auto w1 = weighted_circuit_sat_bruteforce(one, 1);
    REQUIRE(w1.has_value());
    CHECK(*w1 == std::vector<int>{0});

    BooleanCircuit no;
    no.output = no.add_not(no.add_input(0));
    CHECK(!weighted_circuit_sat_bruteforce(no, 1).has_value());
}

TEST_CASE("formula and transliterated circuit agree") {
    int pairs = 0;
    for (uint64_t seed = 1; seed <= 50; ++seed) {
        NormalizedFormula f = random_normalized_formula(seed % 2 ? 3 : 4, 6, 3, seed);
        BooleanCircuit c = formula_to_circuit(f);
        c.validate();
        Rng rng(seed);
        for (int trial = 0; trial < 10; ++trial, ++pairs) {
            auto truth = truth_of(uint32_t(rng.below(64)), 6);
            CHECK(eval_formula(f, truth) == eval_circuit(c, truth));
        }
    }
    CHECK(pairs == 500);
}

TEST_CASE("wsat files parse, print, and reject malformed input") {
    std::string text =
        "(wsat :k 2 :n 4 (and (or (not 0) (not 1)) (or (and (not 2)))))";
    WeightedSatInstance w = parse_wsat(text);
    CHECK(w.k == 2);
    CHECK(w.formula.num_vars == 4);
    CHECK(normalization_level(w.formula) == 3);
    CHECK(is_antimonotone(w.formula));
    std::string once = write_wsat(w);
    CHECK(write_wsat(parse_wsat(once)) == once);

    CHECK_THROWS_AS(parse_wsat("(wsat :k 1 :n 1 (and 0)"), InputError);       // missing paren
    CHECK_THROWS_AS(parse_wsat("(wsat :k 1 (and 0))"), InputError);           // missing :n
    CHECK_THROWS_AS(parse_wsat("(wsat :k 1 :n 1 (or 0))"), InputError);       // OR root
    CHECK_THROWS_AS(parse_wsat("(wsat :k 1 :n 1 (and 4))"), InputError);      // var range
    CHECK_THROWS_AS(parse_wsat("(wsat :k 1 :n 1 (and 0)) junk"), InputError); // trailing
    CHECK_THROWS_WITH_AS(parse_wsat("(wsat :k 1 :n 1\n  (and frog))"),
                         doctest::Contains("line 2"), InputError);
}

TEST_CASE("circuit files parse, print, and reject malformed input") {
    BooleanCircuit c = formula_to_circuit(random_normalized_formula(3, 5, 3, 11));
    std::string once = write_circuit(c);
    BooleanCircuit back = parse_circuit(once);
    CHECK(back.num_vars == c.num_vars);
    CHECK(write_circuit(back) == once);
    for (uint32_t mask = 0; mask < 32; ++mask)
        CHECK(eval_circuit(back, truth_of(mask, 5)) == eval_circuit(c, truth_of(mask, 5)));

    CHECK(parse_circuit("g0 = AND\nout g0\n").gates.size() == 1);
    CHECK_THROWS_AS(parse_circuit(""), InputError);
    CHECK_THROWS_AS(parse_circuit("g0 = IN x0\n"), InputError);              // no out
    CHECK_THROWS_AS(parse_circuit("g0 = IN x0\ng0 = IN x1\nout g0\n"), InputError);
    CHECK_THROWS_AS(parse_circuit("g1 = IN x0\nout g1\n"), InputError);      // sparse ids
    CHECK_THROWS_AS(parse_circuit("g0 = NOT g1\ng1 = NOT g0\nout g0\n"), InputError);
    CHECK_THROWS_WITH_AS(parse_circuit("g0 = IN x0\ng1 = XOR g0\nout g1\n"),
                         doctest::Contains("line 2"), InputError);
}
