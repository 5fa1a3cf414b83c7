#pragma once
// Independent reference implementations used to derive and check expected
// values. They share no code with the library beyond the Graph/RootedTree
// containers.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "treembed/graph.hpp"
#include "treembed/rng.hpp"
#include "treembed/tree.hpp"

namespace oracle {

using Adj = std::vector<std::vector<int>>;

inline Adj adjacency(int n, const std::vector<std::pair<int, int>>& e) {
    Adj a(n);
    for (auto [u, v] : e) a[u].push_back(v), a[v].push_back(u);
    return a;
}

// AHU parenthesis code rooted at r.
inline std::string ahu(const Adj& a, int r, int from) {
    std::vector<std::string> kids;
    for (int w : a[r])
        if (w != from) kids.push_back(ahu(a, w, r));
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (auto& k : kids) s += k;
    return s + ")";
}

// Free-tree canonical code via the graph centre(s) (leaf stripping).
inline std::string free_tree_code(int n, const std::vector<std::pair<int, int>>& e) {
    Adj a = adjacency(n, e);
    if (n == 1) return "()";
    std::vector<int> deg(n);
    std::vector<int> layer;
    for (int v = 0; v < n; ++v) {
        deg[v] = static_cast<int>(a[v].size());
        if (deg[v] <= 1) layer.push_back(v);
    }
    int left = n;
    while (left > 2) {
        left -= static_cast<int>(layer.size());
        std::vector<int> next;
        for (int v : layer)
            for (int w : a[v])
                if (--deg[w] == 1) next.push_back(w);
        layer = next;
    }
    std::string best;
    for (int c : layer) {
        std::string s = ahu(a, c, -1);
        if (best.empty() || s < best) best = s;
    }
    return best;
}

inline std::vector<std::pair<int, int>> prufer_decode(const std::vector<int>& seq, int n) {
    std::vector<int> deg(n, 1);
    for (int x : seq) deg[x]++;
    std::vector<std::pair<int, int>> e;
    for (int x : seq) {
        for (int v = 0; v < n; ++v)
            if (deg[v] == 1) {
                e.emplace_back(v, x);
                deg[v]--;
                deg[x]--;
                break;
            }
    }
    int u = -1;
    for (int v = 0; v < n; ++v)
        if (deg[v] == 1) {
            if (u < 0) u = v;
            else e.emplace_back(u, v);
        }
    return e;
}

// Number of isomorphism classes of free trees on n vertices, counted from
// all n^(n-2) labelled trees.
inline std::size_t count_free_trees_labelled(int n) {
    if (n <= 2) return 1;
    std::set<std::string> codes;
    std::vector<int> seq(n - 2, 0);
    for (;;) {
        codes.insert(free_tree_code(n, prufer_decode(seq, n)));
        int i = 0;
        while (i < n - 2 && ++seq[i] == n) seq[i++] = 0;
        if (i == n - 2) break;
    }
    return codes.size();
}

// Free trees on 1..max_n vertices by leaf extension with canonical dedup.
inline std::vector<std::size_t> count_free_trees_by_extension(int max_n) {
    std::vector<std::size_t> counts{0, 1};
    std::map<std::string, std::vector<std::pair<int, int>>> cur{{"()", {}}};
    for (int n = 2; n <= max_n; ++n) {
        std::map<std::string, std::vector<std::pair<int, int>>> next;
        for (auto& [code, e] : cur)
            for (int v = 0; v < n - 1; ++v) {
                auto e2 = e;
                e2.emplace_back(v, n - 1);
                next.emplace(free_tree_code(n, e2), e2);
            }
        counts.push_back(next.size());
        cur = std::move(next);
    }
    return counts;
}

inline std::vector<int> bfs_dist(const Adj& a, int s) {
    std::vector<int> d(a.size(), -1);
    std::vector<int> q{s};
    d[s] = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
        for (int w : a[q[i]])
            if (d[w] < 0) d[w] = d[q[i]] + 1, q.push_back(w);
    return d;
}

// Component sizes of the forest T - removed.
inline std::vector<std::vector<int>> forest_components(const treembed::RootedTree& T, const std::vector<char>& removed) {
    Adj a = adjacency(T.n(), T.edges());
    std::vector<int> comp(T.n(), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < T.n(); ++s) {
        if (removed[s] || comp[s] >= 0) continue;
        std::vector<int> c{s};
        comp[s] = static_cast<int>(out.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            for (int w : a[c[i]])
                if (!removed[w] && comp[w] < 0) comp[w] = comp[s], c.push_back(w);
        out.push_back(c);
    }
    return out;
}

// Smallest possible heavier class over all proper 2-colourings of T - z.
inline int min_heavier_class(const treembed::RootedTree& T, int z) {
    std::vector<char> rem(T.n(), 0);
    rem[z] = 1;
    auto comps = forest_components(T, rem);
    Adj a = adjacency(T.n(), T.edges());
    std::vector<std::pair<int, int>> cls;
    for (auto& c : comps) {
        auto d = bfs_dist(a, c[0]);
        int even = 0;
        for (int v : c) even += d[v] % 2 == 0;
        cls.emplace_back(even, static_cast<int>(c.size()) - even);
    }
    int best = T.n();
    for (std::size_t mask = 0; mask < (std::size_t{1} << cls.size()); ++mask) {
        int x = 0;
        for (std::size_t i = 0; i < cls.size(); ++i) x += (mask >> i & 1) ? cls[i].second : cls[i].first;
        best = std::min(best, std::max(x, T.t() - x));
    }
    return best;
}

// Star of order t/2 whose centre is one end of a path of order t/2 + 2.
// Vertex 0 is the far end of the path.
inline treembed::RootedTree sharpness_spider(int t) {
    int path = t / 2 + 2, leaves = t / 2 - 1;
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < path; ++i) e.emplace_back(i, i + 1);
    int center = path - 1;
    for (int j = 0; j < leaves; ++j) e.emplace_back(center, path + j);
    return treembed::RootedTree::from_edges(path + leaves, e, 0);
}


// Plain injective backtracking over the pattern in BFS order, no pruning.
inline bool naive_embeds(const treembed::RootedTree& T, const treembed::Graph& G, std::vector<int>* witness = nullptr) {
    const int n = T.n();
    if (n > G.n()) return false;
    std::vector<int> order{T.root()};
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int c : T.children(order[i])) order.push_back(c);
    std::vector<int> phi(n, -1);
    std::vector<char> used(G.n(), 0);
    std::function<bool(std::size_t)> go = [&](std::size_t i) {
        if (i == order.size()) return true;
        int v = order[i];
        for (int h = 0; h < G.n(); ++h) {
            if (used[h]) continue;
            if (v != T.root() && !G.adjacent(phi[T.parent(v)], h)) continue;
            used[h] = 1;
            phi[v] = h;
            if (go(i + 1)) return true;
            used[h] = 0;
        }
        return false;
    };
    bool ok = go(0);
    if (ok && witness) *witness = phi;
    return ok;
}

}  // namespace oracle
