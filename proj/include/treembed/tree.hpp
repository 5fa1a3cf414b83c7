#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "graph_io.hpp"

namespace treembed {

// Tree with a designated root. parent(root) == root; children are kept in
// ascending id order, so every traversal below is deterministic.
class RootedTree {
public:
    RootedTree() = default;

    explicit RootedTree(std::vector<int> parent) : parent_(std::move(parent)) {
        int n = static_cast<int>(parent_.size());
        if (n == 0) throw ContractViolation("tree must have at least one vertex");
        children_.assign(n, {});
        root_ = -1;
        for (int v = 0; v < n; ++v) {
            int p = parent_[v];
            if (p < 0 || p >= n) throw ContractViolation("parent out of range at vertex " + std::to_string(v));
            if (p == v) {
                if (root_ != -1) throw ContractViolation("more than one root");
                root_ = v;
            } else {
                children_[p].push_back(v);
            }
        }
        if (root_ == -1) throw ContractViolation("no root (parent[r] == r) present");
        depth_.assign(n, -1);
        depth_[root_] = 0;
        pre_.reserve(n);
        std::vector<int> stack{root_};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            pre_.push_back(v);
            for (auto it = children_[v].rbegin(); it != children_[v].rend(); ++it) {
                depth_[*it] = depth_[v] + 1;
                stack.push_back(*it);
            }
        }
        if (static_cast<int>(pre_.size()) != n) throw ContractViolation("parent links contain a cycle");
        int h = 0;
        for (int d : depth_) h = std::max(h, d);
        levels_.assign(h + 1, {});
        for (int v = 0; v < n; ++v) levels_[depth_[v]].push_back(v);
        size_.assign(n, 1);
        for (auto it = pre_.rbegin(); it != pre_.rend(); ++it)
            if (*it != root_) size_[parent_[*it]] += size_[*it];
        post_.reserve(n);
        std::vector<std::pair<int, std::size_t>> st{{root_, 0}};
        while (!st.empty()) {
            auto& [v, i] = st.back();
            if (i < children_[v].size()) {
                int c = children_[v][i++];
                st.emplace_back(c, 0);
            } else {
                post_.push_back(v);
                st.pop_back();
            }
        }
    }

    static RootedTree from_edges(int n, const std::vector<std::pair<int, int>>& edges, int root) {
        if (static_cast<int>(edges.size()) != n - 1) throw ContractViolation("a tree on n vertices has n-1 edges");
        Graph g(n, edges);
        if (root < 0 || root >= n) throw ContractViolation("root out of range");
        std::vector<int> parent(n, -1);
        parent[root] = root;
        std::vector<int> stack{root};
        int seen = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : g.neighbors(v))
                if (parent[w] == -1) {
                    parent[w] = v;
                    ++seen;
                    stack.push_back(w);
                }
        }
        if (seen != n) throw ContractViolation("edge list is not a tree");
        return RootedTree(std::move(parent));
    }

    int n() const { return static_cast<int>(parent_.size()); }
    int t() const { return n() - 1; }
    int root() const { return root_; }
    int parent(int v) const { return parent_[v]; }
    const std::vector<int>& parents() const { return parent_; }
    const std::vector<int>& children(int v) const { return children_[v]; }
    int depth(int v) const { return depth_[v]; }
    int height() const { return static_cast<int>(levels_.size()) - 1; }
    const std::vector<std::vector<int>>& levels() const { return levels_; }
    const std::vector<int>& preorder() const { return pre_; }
    const std::vector<int>& postorder() const { return post_; }
    int subtree_size(int v) const { return size_[v]; }
    int degree(int v) const { return static_cast<int>(children_[v].size()) + (v == root_ ? 0 : 1); }
    bool is_leaf(int v) const { return degree(v) <= 1; }

    int max_degree() const {
        int d = 0;
        for (int v = 0; v < n(); ++v) d = std::max(d, degree(v));
        return d;
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> e;
        for (int v = 0; v < n(); ++v)
            if (v != root_) e.emplace_back(std::min(v, parent_[v]), std::max(v, parent_[v]));
        std::sort(e.begin(), e.end());
        return e;
    }

    Graph as_graph() const { return Graph(n(), edges()); }

    RootedTree rerooted(int r) const { return from_edges(n(), edges(), r); }

    // y lies in T(x), i.e. x is on the path from y to the root.
    bool in_subtree(int y, int x) const {
        while (depth_[y] > depth_[x]) y = parent_[y];
        return y == x;
    }

private:
    std::vector<int> parent_;
    int root_ = 0;
    std::vector<std::vector<int>> children_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> levels_;
    std::vector<int> pre_;
    std::vector<int> post_;
    std::vector<int> size_;
};

inline RootedTree make_path(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i == 0 ? 0 : i - 1;
    return RootedTree(p);
}

// Center is vertex 0.
inline RootedTree make_star(int n) { return RootedTree(std::vector<int>(n, 0)); }

// Centroids: one or two vertices minimising the largest component left after deletion.
inline std::vector<int> centroids(const RootedTree& T) {
    int n = T.n();
    std::vector<int> best;
    int best_val = n + 1;
    for (int v = 0; v < n; ++v) {
        int worst = n - T.subtree_size(v);
        for (int c : T.children(v)) worst = std::max(worst, T.subtree_size(c));
        if (worst < best_val) {
            best_val = worst;
            best = {v};
        } else if (worst == best_val) {
            best.push_back(v);
        }
    }
    return best;
}

// (k1, k2): sizes of the two colour classes of the unique proper 2-colouring, k1 >= k2.
inline std::pair<int, int> tree_bipartition_sizes(const RootedTree& T) {
    int even = 0;
    for (int v = 0; v < T.n(); ++v) even += T.depth(v) % 2 == 0;
    int odd = T.n() - even;
    return {std::max(even, odd), std::min(even, odd)};
}

namespace detail {

inline std::vector<int> rooted_level_sequence(const RootedTree& T) {
    std::vector<std::vector<int>> seq(T.n());
    for (int v : T.postorder()) {
        std::vector<std::vector<int>*> kids;
        for (int c : T.children(v)) kids.push_back(&seq[c]);
        std::sort(kids.begin(), kids.end(), [](auto* a, auto* b) { return *a > *b; });
        std::vector<int> s{0};
        for (auto* k : kids)
            for (int d : *k) s.push_back(d + 1);
        seq[v] = std::move(s);
        for (int c : T.children(v)) std::vector<int>().swap(seq[c]);
    }
    return seq[T.root()];
}

}  // namespace detail

// Isomorphism invariant of the free tree: the lexicographically largest
// canonical level sequence over its centroid rootings.
inline std::string canonical_level_sequence(const RootedTree& T) {
    std::vector<int> best;
    for (int c : centroids(T)) {
        auto s = detail::rooted_level_sequence(T.root() == c ? T : T.rerooted(c));
        if (s > best) best = std::move(s);
    }
    std::string out;
    for (std::size_t i = 0; i < best.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(best[i]);
    }
    return out;
}

inline std::string to_parent_array(const RootedTree& T) {
    std::string out = std::to_string(T.n()) + ";";
    for (int v = 0; v < T.n(); ++v) out += " " + std::to_string(T.parent(v));
    return out;
}

// "n; p0 p1 ..." parent arrays, or an edge list rooted at vertex 0.
inline RootedTree parse_tree(const std::string& text) {
    auto semi = text.find(';');
    if (semi == std::string::npos) {
        Graph g = parse_graph(text, GraphFormat::EdgeList);
        if (g.n() == 0) throw ParseError("empty tree", "line 1");
        if (static_cast<int>(g.edge_count()) != g.n() - 1 || !is_connected_set(g, [&] {
                VertexSet all(g.n());
                for (int i = 0; i < g.n(); ++i) all[i] = i;
                return all;
            }()))
            throw ParseError("edge list is not a tree", "line 1");
        return RootedTree::from_edges(g.n(), g.edges(), 0);
    }
    std::istringstream head(text.substr(0, semi));
    int n = -1;
    if (!(head >> n) || n < 1) throw ParseError("bad vertex count", "byte 0");
    std::istringstream body(text.substr(semi + 1));
    std::vector<int> p;
    for (int x; body >> x;) p.push_back(x);
    if (!body.eof()) throw ParseError("non-integer parent entry", "byte " + std::to_string(semi + 1));
    if (static_cast<int>(p.size()) != n)
        throw ParseError("expected " + std::to_string(n) + " parent entries", "byte " + std::to_string(semi + 1));
    try {
        return RootedTree(p);
    } catch (const ContractViolation& e) {
        throw ParseError(e.what(), "byte " + std::to_string(semi + 1));
    }
}

}  // namespace treembed
