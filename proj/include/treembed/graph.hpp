#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace treembed {

using VertexSet = std::vector<int>;  // sorted ascending, no repeats

// Undirected simple graph on vertices 0..n-1. Sorted neighbor lists plus an
// adjacency bit matrix when n is small enough for it.
class Graph {
public:
    Graph() = default;
    explicit Graph(int n) : adj_(n) { init_bits(); }

    // Loops are rejected; repeated pairs collapse to one edge.
    Graph(int n, const std::vector<std::pair<int, int>>& edge_list) : adj_(n) {
        for (auto [u, v] : edge_list) {
            if (u < 0 || v < 0 || u >= n || v >= n) throw ContractViolation("edge endpoint out of range");
            if (u == v) throw ContractViolation("self-loop at vertex " + std::to_string(u));
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& nb : adj_) {
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            m_ += nb.size();
        }
        m_ /= 2;
        init_bits();
    }

    int n() const { return static_cast<int>(adj_.size()); }
    std::size_t edge_count() const { return m_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }

    bool adjacent(int u, int v) const {
        if (!bits_.empty()) {
            std::size_t i = static_cast<std::size_t>(u) * words_ + (static_cast<std::size_t>(v) >> 6);
            return (bits_[i] >> (v & 63)) & 1u;
        }
        return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
    }

    // Row of the bit matrix (words_per_row() words), empty for large graphs.
    const std::uint64_t* row(int v) const {
        return bits_.empty() ? nullptr : bits_.data() + static_cast<std::size_t>(v) * words_;
    }
    std::size_t words_per_row() const { return words_; }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(m_);
        for (int u = 0; u < n(); ++u)
            for (int v : adj_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    friend bool operator==(const Graph& a, const Graph& b) { return a.adj_ == b.adj_; }

private:
    static constexpr int kBitLimit = 1 << 14;

    void init_bits() {
        int nn = n();
        words_ = (static_cast<std::size_t>(nn) + 63) / 64;
        if (nn == 0 || nn > kBitLimit) {
            bits_.clear();
            return;
        }
        bits_.assign(static_cast<std::size_t>(nn) * words_, 0);
        for (int u = 0; u < nn; ++u)
            for (int v : adj_[u]) bits_[static_cast<std::size_t>(u) * words_ + (v >> 6)] |= std::uint64_t{1} << (v & 63);
    }

    std::vector<std::vector<int>> adj_;
    std::size_t m_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

struct Bipartition {
    VertexSet classA;  // the larger class
    VertexSet classB;
};

struct DegreeStats {
    int min = 0;
    Rational average;
    int max = 0;
};

// Distances from `source`; -1 for unreachable. If `inside` is given, the
// search is confined to vertices with inside[v] true.
inline std::vector<int> bfs_distances(const Graph& G, int source, const std::vector<char>* inside = nullptr,
                                      int radius = -1) {
    std::vector<int> dist(G.n(), -1);
    std::queue<int> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (radius >= 0 && dist[u] == radius) continue;
        for (int w : G.neighbors(u)) {
            if (dist[w] != -1 || (inside && !(*inside)[w])) continue;
            dist[w] = dist[u] + 1;
            q.push(w);
        }
    }
    return dist;
}

inline std::vector<char> membership(int n, const VertexSet& s) {
    std::vector<char> in(n, 0);
    for (int v : s) in[v] = 1;
    return in;
}

inline std::vector<VertexSet> components(const Graph& G) {
    std::vector<int> comp(G.n(), -1);
    std::vector<VertexSet> out;
    for (int s = 0; s < G.n(); ++s) {
        if (comp[s] != -1) continue;
        VertexSet c{s};
        comp[s] = static_cast<int>(out.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            for (int w : G.neighbors(c[i]))
                if (comp[w] == -1) {
                    comp[w] = comp[s];
                    c.push_back(w);
                }
        std::sort(c.begin(), c.end());
        out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(), [](const VertexSet& a, const VertexSet& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.front() < b.front();
    });
    return out;
}

inline bool is_connected_set(const Graph& G, const VertexSet& s) {
    if (s.empty()) return true;
    auto in = membership(G.n(), s);
    auto dist = bfs_distances(G, s.front(), &in);
    return std::all_of(s.begin(), s.end(), [&](int v) { return dist[v] >= 0; });
}

inline std::optional<Bipartition> bipartition(const Graph& G, const VertexSet& component) {
    if (component.empty() || !is_connected_set(G, component))
        throw ContractViolation("bipartition: vertex set is not a connected component");
    auto in = membership(G.n(), component);
    std::vector<int> side(G.n(), -1);
    side[component.front()] = 0;
    std::vector<int> stack{component.front()};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w : G.neighbors(u)) {
            if (!in[w]) continue;
            if (side[w] == -1) {
                side[w] = 1 - side[u];
                stack.push_back(w);
            } else if (side[w] == side[u]) {
                return std::nullopt;
            }
        }
    }
    Bipartition b;
    for (int v : component) (side[v] == 0 ? b.classA : b.classB).push_back(v);
    // classA holds component.front(), the smallest vertex, which settles ties.
    if (b.classB.size() > b.classA.size()) std::swap(b.classA, b.classB);
    return b;
}

inline DegreeStats degree_stats(const Graph& G) {
    if (G.n() == 0) throw ContractViolation("degree_stats: empty graph");
    DegreeStats s{G.degree(0), Rational(2 * static_cast<std::int64_t>(G.edge_count()), G.n()), G.degree(0)};
    for (int v = 1; v < G.n(); ++v) {
        s.min = std::min(s.min, G.degree(v));
        s.max = std::max(s.max, G.degree(v));
    }
    return s;
}

inline int min_degree_in(const Graph& G, const VertexSet& s) {
    int d = G.n();
    for (int v : s) d = std::min(d, G.degree(v));
    return d;
}

// Exact diameter of a connected vertex set. When the set is a component
// with minimum degree at least 2, diam <= floor(3n/(delta+1)) - 1 is checked.
inline int diameter(const Graph& G, const VertexSet& component) {
    if (component.empty()) throw ContractViolation("diameter: empty component");
    auto in = membership(G.n(), component);
    int diam = 0;
    for (int s : component) {
        auto dist = bfs_distances(G, s, &in);
        for (int v : component) {
            if (dist[v] < 0) throw ContractViolation("diameter: vertex set is not connected");
            diam = std::max(diam, dist[v]);
        }
    }
    bool closed = true;
    for (int v : component)
        for (int w : G.neighbors(v))
            if (!in[w]) closed = false;
    int delta = min_degree_in(G, component);
    int nc = static_cast<int>(component.size());
    if (closed && delta >= 2 && diam > 3 * nc / (delta + 1) - 1)
        throw InvariantViolation("diameter exceeds floor(3n/(delta+1))-1");
    return diam;
}

// Vertices within distance r of v. For r = 3q+1 the size is checked against
// min{(q+1)(delta+1), |component of v|}.
inline VertexSet ball(const Graph& G, int v, int r) {
    if (v < 0 || v >= G.n() || r < 0) throw ContractViolation("ball: bad vertex or radius");
    auto dist = bfs_distances(G, v, nullptr, r);
    VertexSet out;
    for (int u = 0; u < G.n(); ++u)
        if (dist[u] >= 0) out.push_back(u);
    if (r % 3 == 1) {
        auto all = bfs_distances(G, v);
        VertexSet comp;
        for (int u = 0; u < G.n(); ++u)
            if (all[u] >= 0) comp.push_back(u);
        std::int64_t q = (r - 1) / 3;
        std::int64_t bound = std::min<std::int64_t>((q + 1) * (min_degree_in(G, comp) + 1),
                                                    static_cast<std::int64_t>(comp.size()));
        if (static_cast<std::int64_t>(out.size()) < bound)
            throw InvariantViolation("ball smaller than min{(q+1)(delta+1), n}");
    }
    return out;
}

// Subgraph induced by `keep` (sorted); vertex i of the result is keep[i].
inline Graph induced_subgraph(const Graph& G, const VertexSet& keep) {
    std::vector<int> idx(G.n(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) idx[keep[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> e;
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (int w : G.neighbors(keep[i]))
            if (idx[w] > static_cast<int>(i)) e.emplace_back(static_cast<int>(i), idx[w]);
    return Graph(static_cast<int>(keep.size()), e);
}

inline int count_neighbors_in(const Graph& G, int v, const std::vector<char>& in) {
    int c = 0;
    for (int w : G.neighbors(v)) c += in[w];
    return c;
}

}  // namespace treembed
