#include "csplab/unitrees.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "csplab/textio.hpp"

namespace csplab {

int OrderedTree::add_child(int p) {
    if (p == -1) {
        if (!parent.empty()) throw InputError("tree already has a root");
    } else if (p < 0 || p >= size()) {
        throw InputError("parent out of range");
    }
    int id = size();
    parent.push_back(p);
    children.emplace_back();
    note.emplace_back(-1, -1);
    if (p >= 0) children[size_t(p)].push_back(id);
    return id;
}

int OrderedTree::depth() const {
    validate();
    int best = 0;
    auto walk = [&](auto&& self, int v, int d) -> void {
        best = std::max(best, d);
        for (int c : children[size_t(v)]) self(self, c, d + 1);
    };
    walk(walk, root, 1);
    return best;
}

int OrderedTree::leaf_count() const {
    validate();
    int leaves = 0;
    for (int v = 0; v < size(); ++v)
        if (children[size_t(v)].empty()) ++leaves;
    return leaves;
}

void OrderedTree::validate() const {
    if (parent.empty()) throw InputError("empty tree");
    if (children.size() != parent.size() || note.size() != parent.size())
        throw InputError("tree arrays out of step");
    if (root < 0 || root >= size() || parent[size_t(root)] != -1)
        throw InputError("missing root");
    int seen = 0;
    std::vector<char> mark(parent.size(), 0);
    auto walk = [&](auto&& self, int v) -> void {
        if (v < 0 || v >= size() || mark[size_t(v)]) throw InputError("malformed tree links");
        mark[size_t(v)] = 1;
        ++seen;
        for (int c : children[size_t(v)]) {
            if (c < 0 || c >= size() || parent[size_t(c)] != v)
                throw InputError("malformed tree links");
            self(self, c);
        }
    };
    walk(walk, root);
    if (seen != size()) throw InputError("tree is not connected");
}

std::string ordered_encoding(const OrderedTree& t) {
    t.validate();
    std::string out;
    auto walk = [&](auto&& self, int v) -> void {
        out.push_back('(');
        for (int c : t.children[size_t(v)]) self(self, c);
        out.push_back(')');
    };
    walk(walk, t.root);
    return out;
}

namespace {

void attach_universal_children(OrderedTree& t, int at, int n, int k);

int attach_universal(OrderedTree& t, int p, int n, int k) {
    int id = t.add_child(p);
    t.note[size_t(id)] = {n, k};
    attach_universal_children(t, id, n, k);
    return id;
}

void attach_universal_children(OrderedTree& t, int at, int n, int k) {
    if (n <= 0 || k <= 1) return;
    attach_universal_children(t, at, n / 2, k);
    attach_universal(t, at, n, k - 1);
    attach_universal_children(t, at, n - n / 2 - 1, k);
}

} // namespace

OrderedTree build_universal_tree(int n, int k) {
    if (n < 0 || k < 1) throw InputError("universal tree needs n >= 0, k >= 1");
    OrderedTree t;
    attach_universal(t, -1, n, k);
    return t;
}

std::vector<std::pair<int, int>> annotate_subtrees(const OrderedTree& u) {
    u.validate();
    for (auto [np, kp] : u.note)
        if (np < 0 || kp < 1) throw InputError("tree carries no construction annotations");
    return u.note;
}

namespace {

struct Embedder {
    const OrderedTree& s;
    const OrderedTree& t;
    std::vector<std::vector<signed char>> memo;

    Embedder(const OrderedTree& s_, const OrderedTree& t_)
        : s(s_), t(t_),
          memo(size_t(s_.size()), std::vector<signed char>(size_t(t_.size()), -1)) {}

    bool embeds(int u, int v) {
        signed char& m = memo[size_t(u)][size_t(v)];
        if (m >= 0) return m != 0;
        m = match(u, v, 0, 0) ? 1 : 0;
        return m != 0;
    }

    // children of u from index i map into children of v from index j on
    bool match(int u, int v, size_t i, size_t j) {
        const auto& cu = s.children[size_t(u)];
        const auto& cv = t.children[size_t(v)];
        if (i == cu.size()) return true;
        if (cv.size() - j < cu.size() - i) return false;
        if (embeds(cu[i], cv[j]) && match(u, v, i + 1, j + 1)) return true;
        return match(u, v, i, j + 1);
    }
};

} // namespace

std::optional<std::vector<int>> find_embedding(const OrderedTree& s, const OrderedTree& t) {
    s.validate();
    t.validate();
    Embedder e(s, t);
    if (!e.embeds(s.root, t.root)) return std::nullopt;
    std::vector<int> phi(size_t(s.size()), -1);
    auto assign = [&](auto&& self, int u, int v) -> void {
        phi[size_t(u)] = v;
        const auto& cu = s.children[size_t(u)];
        const auto& cv = t.children[size_t(v)];
        size_t j = 0;
        for (size_t i = 0; i < cu.size(); ++i) {
            while (!(e.embeds(cu[i], cv[j]) && e.match(u, v, i + 1, j + 1))) ++j;
            self(self, cu[i], cv[j]);
            ++j;
        }
    };
    assign(assign, s.root, t.root);
    return phi;
}

bool validate_embedding(const OrderedTree& s, const OrderedTree& t, const std::vector<int>& phi,
                        std::string* why) {
    auto reject = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (int(phi.size()) != s.size()) return reject("map size differs from tree size");
    for (int v : phi)
        if (v < 0 || v >= t.size()) return reject("image out of range");
    std::vector<char> used(size_t(t.size()), 0);
    for (int v : phi) {
        if (used[size_t(v)]) return reject("map is not injective");
        used[size_t(v)] = 1;
    }
    if (phi[size_t(s.root)] != t.root) return reject("root does not map to root");
    for (int u = 0; u < s.size(); ++u) {
        const auto& cv = t.children[size_t(phi[size_t(u)])];
        long last = -1;
        for (int c : s.children[size_t(u)]) {
            auto it = std::find(cv.begin(), cv.end(), phi[size_t(c)]);
            if (it == cv.end()) return reject("child image is not a child of the parent image");
            long pos = it - cv.begin();
            if (pos <= last) return reject("child order not preserved");
            last = pos;
        }
    }
    return true;
}

namespace {

// ordered trees with exactly `leaves` leaves and depth <= depth
const std::vector<OrderedTree>& shapes_exact(std::map<std::pair<int, int>, std::vector<OrderedTree>>& memo,
                                             int depth, int leaves) {
    auto key = std::make_pair(depth, leaves);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<OrderedTree> out;
    if (depth >= 1 && leaves >= 1) {
        if (leaves == 1) {
            OrderedTree single;
            single.add_child(-1);
            out.push_back(std::move(single));
        }
        if (depth >= 2) {
            // root plus an ordered forest: compositions of `leaves`
            std::vector<std::vector<const OrderedTree*>> forests;
            std::vector<const OrderedTree*> cur;
            auto grow = [&](auto&& self, int remaining) -> void {
                if (remaining == 0) {
                    if (!cur.empty()) forests.push_back(cur);
                    return;
                }
                for (int part = 1; part <= remaining; ++part)
                    for (const OrderedTree& sub : shapes_exact(memo, depth - 1, part)) {
                        cur.push_back(&sub);
                        self(self, remaining - part);
                        cur.pop_back();
                    }
            };
            grow(grow, leaves);
            for (auto& forest : forests) {
                OrderedTree t;
                t.add_child(-1);
                auto graft = [&](auto&& self, int under, const OrderedTree& sub, int at) -> void {
                    int id = t.add_child(under);
                    for (int c : sub.children[size_t(at)]) self(self, id, sub, c);
                };
                for (const OrderedTree* sub : forest) graft(graft, 0, *sub, sub->root);
                out.push_back(std::move(t));
            }
        }
    }
    return memo.emplace(key, std::move(out)).first->second;
}

} // namespace

std::vector<OrderedTree> enumerate_ordered_trees(int max_leaves, int max_depth) {
    if (max_leaves < 1 || max_depth < 1)
        throw InputError("enumeration needs at least one leaf and depth 1");
    if (max_leaves > 5 || max_depth > 4)
        throw ResourceError("enumeration capped at 5 leaves and depth 4");
    std::map<std::pair<int, int>, std::vector<OrderedTree>> memo;
    std::vector<OrderedTree> out;
    for (int leaves = 1; leaves <= max_leaves; ++leaves)
        for (const OrderedTree& t : shapes_exact(memo, max_depth, leaves)) out.push_back(t);
    return out;
}

std::optional<std::vector<int>> select_children(const OrderedTree& u,
                                                const std::vector<int>& demands) {
    auto note = annotate_subtrees(u);
    std::vector<int> picked;
    size_t i = 0;
    for (int child : u.children[size_t(u.root)]) {
        if (i == demands.size()) break;
        if (note[size_t(child)].first >= demands[i]) {
            picked.push_back(child);
            ++i;
        }
    }
    if (i != demands.size()) return std::nullopt;
    return picked;
}

OrderedTree parse_ordered_tree(const std::string& text) {
    auto lines = tokenize_text(text);
    if (lines.empty()) throw InputError("empty tree file");
    const Line& head = lines[0];
    if (head.tok(0, "header") != "tree") head.fail("expected 'tree <n>'");
    int n = head.num(1, "node count");
    if (n < 1) head.fail("tree needs at least one node");

    OrderedTree t;
    t.parent.assign(size_t(n), -1);
    t.children.assign(size_t(n), {});
    t.note.assign(size_t(n), {-1, -1});
    bool have_parents = false;
    int ut_lines = 0;
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tokens[0] == "parents") {
            if (have_parents) l.fail("second parents line");
            if (int(l.tokens.size()) != n + 1) l.fail("parents needs one entry per node");
            have_parents = true;
            int roots = 0;
            for (int v = 0; v < n; ++v) {
                int p = l.num(size_t(v) + 1, "parent");
                if (p == -1)
                    ++roots;
                else if (p < 0 || p >= n)
                    l.fail("parent out of range");
                t.parent[size_t(v)] = p;
                if (p >= 0) t.children[size_t(p)].push_back(v);
            }
            if (roots != 1) l.fail("tree needs exactly one root");
            for (int v = 0; v < n; ++v)
                if (t.parent[size_t(v)] == -1) t.root = v;
        } else if (l.tokens[0] == "ut") {
            int v = l.num(1, "node");
            if (v < 0 || v >= n) l.fail("node out of range");
            if (t.note[size_t(v)].first >= 0) l.fail("annotation declared twice");
            t.note[size_t(v)] = {l.num(2, "capacity"), l.num(3, "depth")};
            if (t.note[size_t(v)].first < 0 || t.note[size_t(v)].second < 1)
                l.fail("annotation needs capacity >= 0 and depth >= 1");
            ++ut_lines;
        } else {
            l.fail("unknown directive '" + l.tokens[0] + "'");
        }
    }
    if (!have_parents) throw InputError("missing parents line");
    if (ut_lines != 0 && ut_lines != n)
        throw InputError("annotations must cover every node or none");
    try {
        t.validate();
    } catch (const InputError& e) {
        throw InputError(std::string("bad tree file: ") + e.what());
    }
    return t;
}

std::string write_ordered_tree(const OrderedTree& t) {
    t.validate();
    // renumber in preorder so that ascending ids reproduce the child order
    std::vector<int> order, renum(size_t(t.size()), -1);
    auto walk = [&](auto&& self, int v) -> void {
        renum[size_t(v)] = int(order.size());
        order.push_back(v);
        for (int c : t.children[size_t(v)]) self(self, c);
    };
    walk(walk, t.root);
    std::ostringstream out;
    out << "tree " << t.size() << "\n";
    out << "parents";
    for (int v : order) {
        int p = t.parent[size_t(v)];
        out << " " << (p == -1 ? -1 : renum[size_t(p)]);
    }
    out << "\n";
    bool annotated = true;
    for (auto [np, kp] : t.note)
        if (np < 0 || kp < 1) annotated = false;
    if (annotated)
        for (int v : order)
            out << "ut " << renum[size_t(v)] << " " << t.note[size_t(v)].first << " "
                << t.note[size_t(v)].second << "\n";
    return out.str();
}

} // namespace csplab
