#include "csplab/core.hpp"

#include <algorithm>
#include <sstream>

#include "csplab/rng.hpp"
#include "csplab/textio.hpp"

namespace csplab {

namespace {

void sort_unique(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void sort_unique(std::vector<std::pair<int, int>>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<std::pair<int, int>> transpose(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<std::pair<int, int>> out;
    out.reserve(pairs.size());
    for (auto [a, b] : pairs) out.emplace_back(b, a);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

void BinCspInstance::add_constraint(int u, int v, std::vector<std::pair<int, int>> pairs) {
    if (u == v) throw InputError("constraint needs two distinct variables");
    if (u < 0 || v < 0 || u >= n || v >= n) throw InputError("constraint variable out of range");
    if (u > v) {
        std::swap(u, v);
        pairs = transpose(pairs);
    }
    sort_unique(pairs);
    for (auto [a, b] : pairs)
        if (!in_domain(u, a) || !in_domain(v, b))
            throw InputError("allowed pair outside declared domains on edge " +
                             std::to_string(u) + "-" + std::to_string(v));
    if (constraints.count({u, v}))
        throw InputError("edge constrained twice: " + std::to_string(u) + "-" + std::to_string(v));
    constraints.emplace(std::make_pair(u, v), std::move(pairs));
}

void BinCspInstance::intersect_constraint(int u, int v, std::vector<std::pair<int, int>> pairs) {
    bool flip = u > v;
    auto key = flip ? std::make_pair(v, u) : std::make_pair(u, v);
    auto it = constraints.find(key);
    if (it == constraints.end()) {
        add_constraint(u, v, std::move(pairs));
        return;
    }
    if (flip) pairs = transpose(pairs);
    sort_unique(pairs);
    std::vector<std::pair<int, int>> merged;
    std::set_intersection(it->second.begin(), it->second.end(), pairs.begin(), pairs.end(),
                          std::back_inserter(merged));
    it->second = std::move(merged);
}

bool BinCspInstance::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return constraints.count({u, v}) != 0;
}

std::vector<std::pair<int, int>> BinCspInstance::allowed(int u, int v) const {
    bool flip = u > v;
    auto key = flip ? std::make_pair(v, u) : std::make_pair(u, v);
    auto it = constraints.find(key);
    if (it == constraints.end())
        throw InputError("no constraint on edge " + std::to_string(u) + "-" + std::to_string(v));
    return flip ? transpose(it->second) : it->second;
}

bool BinCspInstance::pair_allowed(int u, int v, int a, int b) const {
    bool flip = u > v;
    if (flip) {
        std::swap(u, v);
        std::swap(a, b);
    }
    auto it = constraints.find({u, v});
    if (it == constraints.end())
        throw InputError("no constraint on edge " + std::to_string(u) + "-" + std::to_string(v));
    return std::binary_search(it->second.begin(), it->second.end(), std::make_pair(a, b));
}

bool BinCspInstance::in_domain(int u, int value) const {
    if (u < 0 || u >= n) throw InputError("variable out of range: " + std::to_string(u));
    return std::binary_search(domains[size_t(u)].begin(), domains[size_t(u)].end(), value);
}

std::vector<std::pair<int, int>> BinCspInstance::edge_list() const {
    std::vector<std::pair<int, int>> e;
    e.reserve(constraints.size());
    for (auto& [key, _] : constraints) e.push_back(key);
    return e;
}

Graph BinCspInstance::gaifman() const { return Graph(n, edge_list()); }

void BinCspInstance::validate() const {
    if (n < 0) throw InputError("negative variable count");
    if (int(domains.size()) != n) throw InputError("domain count differs from variable count");
    for (int u = 0; u < n; ++u) {
        auto d = domains[size_t(u)];
        auto s = d;
        sort_unique(s);
        if (s != d) throw InputError("domain of variable " + std::to_string(u) +
                                     " is not sorted and duplicate-free");
    }
    for (auto& [key, pairs] : constraints) {
        auto [u, v] = key;
        if (u < 0 || v >= n || u >= v) throw InputError("bad constraint key");
        auto p = pairs;
        sort_unique(p);
        if (p != pairs) throw InputError("constraint pairs not canonical");
        for (auto [a, b] : pairs)
            if (!in_domain(u, a) || !in_domain(v, b))
                throw InputError("allowed pair outside declared domains");
    }
}

bool check_assignment(const BinCspInstance& inst, const std::vector<int>& assignment) {
    if (int(assignment.size()) != inst.n)
        throw InputError("assignment must be total: expected " + std::to_string(inst.n) +
                         " values, got " + std::to_string(assignment.size()));
    for (int u = 0; u < inst.n; ++u)
        if (!inst.in_domain(u, assignment[size_t(u)]))
            throw InputError("value of variable " + std::to_string(u) + " outside its domain");
    for (auto& [key, pairs] : inst.constraints) {
        auto [u, v] = key;
        auto want = std::make_pair(assignment[size_t(u)], assignment[size_t(v)]);
        if (!std::binary_search(pairs.begin(), pairs.end(), want)) return false;
    }
    return true;
}

void ListColoringInstance::validate() const {
    if (int(lists.size()) != graph.n) throw InputError("list count differs from vertex count");
    auto c = colors;
    sort_unique(c);
    if (c != colors) throw InputError("color set not sorted and duplicate-free");
    for (auto& list : lists) {
        auto l = list;
        sort_unique(l);
        if (l != list) throw InputError("vertex list not canonical");
        for (int col : list)
            if (!std::binary_search(colors.begin(), colors.end(), col))
                throw InputError("list color outside the global color set");
    }
}

void PrecoloringInstance::validate() const {
    auto c = colors;
    sort_unique(c);
    if (c != colors) throw InputError("color set not sorted and duplicate-free");
    for (auto& [v, col] : precolor) {
        if (v < 0 || v >= graph.n) throw InputError("precolored vertex out of range");
        if (!std::binary_search(colors.begin(), colors.end(), col))
            throw InputError("precoloring uses unknown color");
    }
}

BinCspInstance listcoloring_to_bincsp(const ListColoringInstance& lc) {
    lc.validate();
    BinCspInstance inst;
    inst.n = lc.graph.n;
    inst.domains = lc.lists;
    for (auto [u, v] : lc.graph.edges) {
        std::vector<std::pair<int, int>> pairs;
        for (int a : lc.lists[size_t(u)])
            for (int b : lc.lists[size_t(v)])
                if (a != b) pairs.emplace_back(a, b);
        inst.add_constraint(u, v, std::move(pairs));
    }
    return inst;
}

TaggedListColoring bincsp_to_listcoloring(const BinCspInstance& inst) {
    inst.validate();
    TaggedListColoring out;
    out.tag.resize(size_t(inst.n));
    int next_color = 0;
    std::vector<int> colors;
    for (int u = 0; u < inst.n; ++u)
        for (size_t i = 0; i < inst.domains[size_t(u)].size(); ++i) {
            out.tag[size_t(u)].push_back(next_color);
            colors.push_back(next_color++);
        }

    auto tag_of = [&](int u, int value) {
        auto& dom = inst.domains[size_t(u)];
        auto it = std::lower_bound(dom.begin(), dom.end(), value);
        return out.tag[size_t(u)][size_t(it - dom.begin())];
    };

    std::vector<std::vector<int>> lists;
    for (int u = 0; u < inst.n; ++u) lists.push_back(out.tag[size_t(u)]);

    std::vector<std::pair<int, int>> edges;
    int next_vertex = inst.n;
    for (auto& [key, pairs] : inst.constraints) {
        auto [u, v] = key;
        for (int a : inst.domains[size_t(u)])
            for (int b : inst.domains[size_t(v)]) {
                if (std::binary_search(pairs.begin(), pairs.end(), std::make_pair(a, b)))
                    continue;
                int g = next_vertex++;
                lists.push_back({tag_of(u, a), tag_of(v, b)});
                std::sort(lists.back().begin(), lists.back().end());
                edges.emplace_back(u, g);
                edges.emplace_back(v, g);
                ++out.gadget_vertices;
            }
    }
    out.lc.graph = Graph(next_vertex, std::move(edges));
    out.lc.colors = std::move(colors);
    out.lc.lists = std::move(lists);
    out.lc.validate();
    return out;
}

BinCspInstance random_instance(int n, int max_dom, double edge_prob, double pair_prob,
                               uint64_t seed) {
    if (n < 0 || max_dom < 1) throw InputError("random_instance needs n >= 0, max_dom >= 1");
    Rng rng(seed);
    BinCspInstance inst;
    inst.n = n;
    inst.domains.resize(size_t(n));
    for (int u = 0; u < n; ++u) {
        int size = rng.range(1, max_dom);
        for (int a = 0; a < size; ++a) inst.domains[size_t(u)].push_back(a);
    }
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            if (!rng.chance(edge_prob)) continue;
            std::vector<std::pair<int, int>> pairs;
            for (int a : inst.domains[size_t(u)])
                for (int b : inst.domains[size_t(v)])
                    if (rng.chance(pair_prob)) pairs.emplace_back(a, b);
            inst.add_constraint(u, v, std::move(pairs));
        }
    return inst;
}

BinCspInstance parse_bincsp(const std::string& text) {
    auto lines = tokenize_text(text);
    if (lines.empty()) throw InputError("empty instance file");
    const Line& head = lines[0];
    if (head.tok(0, "header") != "bincsp") head.fail("expected 'bincsp <n>'");
    int n = head.num(1, "variable count");
    if (n < 0) head.fail("negative variable count");
    BinCspInstance inst;
    inst.n = n;
    inst.domains.resize(size_t(n));
    std::vector<char> seen(size_t(n), 0);
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        const std::string& kind = l.tokens[0];
        if (kind == "domain") {
            int u = l.num(1, "variable");
            if (u < 0 || u >= n) l.fail("variable out of range");
            if (seen[size_t(u)]) l.fail("domain declared twice");
            seen[size_t(u)] = 1;
            for (size_t j = 2; j < l.tokens.size(); ++j)
                inst.domains[size_t(u)].push_back(l.num(j, "value"));
            sort_unique(inst.domains[size_t(u)]);
        } else if (kind == "constraint") {
            int u = l.num(1, "variable"), v = l.num(2, "variable");
            if ((l.tokens.size() - 3) % 2 != 0) l.fail("constraint needs value pairs");
            std::vector<std::pair<int, int>> pairs;
            for (size_t j = 3; j + 1 < l.tokens.size(); j += 2)
                pairs.emplace_back(l.num(j, "value"), l.num(j + 1, "value"));
            try {
                inst.add_constraint(u, v, std::move(pairs));
            } catch (const InputError& e) {
                l.fail(e.what());
            }
        } else {
            l.fail("unknown directive '" + kind + "'");
        }
    }
    inst.validate();
    return inst;
}

std::string write_bincsp(const BinCspInstance& inst) {
    std::ostringstream out;
    out << "bincsp " << inst.n << "\n";
    for (int u = 0; u < inst.n; ++u) {
        out << "domain " << u;
        for (int a : inst.domains[size_t(u)]) out << " " << a;
        out << "\n";
    }
    for (auto& [key, pairs] : inst.constraints) {
        out << "constraint " << key.first << " " << key.second;
        for (auto [a, b] : pairs) out << " " << a << " " << b;
        out << "\n";
    }
    return out.str();
}

namespace {

// .lcol and .pcol share the shell: header, colors line, edges, one
// vertex-specific directive.
template <class Body>
void parse_colored_graph(const std::string& text, const char* header, int& n,
                         std::vector<int>& colors, std::vector<std::pair<int, int>>& edges,
                         const Body& body) {
    auto lines = tokenize_text(text);
    if (lines.empty()) throw InputError(std::string("empty ") + header + " file");
    const Line& head = lines[0];
    if (head.tok(0, "header") != header)
        head.fail(std::string("expected '") + header + " <n>'");
    n = head.num(1, "vertex count");
    if (n < 0) head.fail("negative vertex count");
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        const std::string& kind = l.tokens[0];
        if (kind == "colors") {
            for (size_t j = 1; j < l.tokens.size(); ++j) colors.push_back(l.num(j, "color"));
            sort_unique(colors);
        } else if (kind == "edge") {
            int u = l.num(1, "endpoint"), v = l.num(2, "endpoint");
            if (u < 0 || v < 0 || u >= n || v >= n) l.fail("endpoint out of range");
            edges.emplace_back(u, v);
        } else {
            body(l);
        }
    }
}

} // namespace

ListColoringInstance parse_listcoloring(const std::string& text) {
    ListColoringInstance lc;
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> lists;
    std::vector<char> seen;
    parse_colored_graph(text, "listcoloring", n, lc.colors, edges, [&](const Line& l) {
        if (lists.empty()) {
            lists.resize(size_t(n));
            seen.assign(size_t(n), 0);
        }
        if (l.tokens[0] != "list") l.fail("unknown directive '" + l.tokens[0] + "'");
        int v = l.num(1, "vertex");
        if (v < 0 || v >= n) l.fail("vertex out of range");
        if (seen[size_t(v)]) l.fail("list declared twice");
        seen[size_t(v)] = 1;
        for (size_t j = 2; j < l.tokens.size(); ++j)
            lists[size_t(v)].push_back(l.num(j, "color"));
        sort_unique(lists[size_t(v)]);
    });
    if (lists.empty()) lists.resize(size_t(n));
    lc.graph = Graph(n, std::move(edges));
    lc.lists = std::move(lists);
    lc.validate();
    return lc;
}

std::string write_listcoloring(const ListColoringInstance& lc) {
    std::ostringstream out;
    out << "listcoloring " << lc.graph.n << "\n";
    out << "colors";
    for (int c : lc.colors) out << " " << c;
    out << "\n";
    for (int v = 0; v < lc.graph.n; ++v) {
        out << "list " << v;
        for (int c : lc.lists[size_t(v)]) out << " " << c;
        out << "\n";
    }
    for (auto [u, v] : lc.graph.edges) out << "edge " << u << " " << v << "\n";
    return out.str();
}

PrecoloringInstance parse_precoloring(const std::string& text) {
    PrecoloringInstance pre;
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    parse_colored_graph(text, "precoloring", n, pre.colors, edges, [&](const Line& l) {
        if (l.tokens[0] != "precolor") l.fail("unknown directive '" + l.tokens[0] + "'");
        int v = l.num(1, "vertex");
        if (v < 0 || v >= n) l.fail("vertex out of range");
        if (pre.precolor.count(v)) l.fail("vertex precolored twice");
        pre.precolor[v] = l.num(2, "color");
    });
    pre.graph = Graph(n, std::move(edges));
    pre.validate();
    return pre;
}

std::string write_precoloring(const PrecoloringInstance& pre) {
    std::ostringstream out;
    out << "precoloring " << pre.graph.n << "\n";
    out << "colors";
    for (int c : pre.colors) out << " " << c;
    out << "\n";
    for (auto& [v, c] : pre.precolor) out << "precolor " << v << " " << c << "\n";
    for (auto [u, v] : pre.graph.edges) out << "edge " << u << " " << v << "\n";
    return out.str();
}

} // namespace csplab
