#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "graph.hpp"

namespace treembed {

namespace detail {

// Upper-triangle adjacency bits of the graph relabelled by `order`
// (order[i] = old vertex placed at position i).
inline std::uint64_t code_under(const std::vector<std::uint16_t>& adj, const std::vector<int>& order) {
    std::uint64_t code = 0;
    const int n = static_cast<int>(order.size());
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) code = (code << 1) | ((adj[order[i]] >> order[j]) & 1u);
    return code;
}

// Canonical code: colour refinement fixes an isomorphism-invariant ordered
// cell partition; the code is the minimum over orderings within cells.
inline std::uint64_t canonical_code(const std::vector<std::uint16_t>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> color(n);
    for (int v = 0; v < n; ++v) color[v] = std::popcount(static_cast<unsigned>(adj[v]));
    for (;;) {
        std::vector<std::pair<std::vector<int>, int>> sig(n);
        for (int v = 0; v < n; ++v) {
            std::vector<int> s{color[v]};
            std::vector<int> nb;
            for (int w = 0; w < n; ++w)
                if (adj[v] >> w & 1) nb.push_back(color[w]);
            std::sort(nb.begin(), nb.end());
            s.insert(s.end(), nb.begin(), nb.end());
            sig[v] = {s, v};
        }
        std::vector<std::vector<int>> keys;
        for (auto& s : sig) keys.push_back(s.first);
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        std::vector<int> next(n);
        for (int v = 0; v < n; ++v)
            next[v] = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), sig[v].first) - keys.begin());
        std::vector<int> distinct_before(color);
        std::sort(distinct_before.begin(), distinct_before.end());
        distinct_before.erase(std::unique(distinct_before.begin(), distinct_before.end()), distinct_before.end());
        color = next;
        if (keys.size() == distinct_before.size()) break;
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return color[a] != color[b] ? color[a] < color[b] : a < b; });
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < n;) {
        int j = i;
        while (j < n && color[order[j]] == color[order[i]]) ++j;
        cells.emplace_back(i, j);
        i = j;
    }
    std::uint64_t best = ~std::uint64_t{0};
    std::function<void(std::size_t)> rec = [&](std::size_t c) {
        if (c == cells.size()) {
            best = std::min(best, code_under(adj, order));
            return;
        }
        auto [lo, hi] = cells[c];
        std::sort(order.begin() + lo, order.begin() + hi);
        do rec(c + 1);
        while (std::next_permutation(order.begin() + lo, order.begin() + hi));
    };
    rec(0);
    return best;
}

}  // namespace detail

// All graphs on n <= 10 vertices up to isomorphism, built by adding a vertex
// with every possible neighbourhood to each graph on n-1 vertices.
inline std::vector<Graph> enumerate_graphs(int n) {
    if (n < 0 || n > 10) throw ContractViolation("enumerate_graphs: n must be in 0..10");
    std::vector<std::vector<std::uint16_t>> cur{{}};
    for (int k = 1; k <= n; ++k) {
        std::unordered_set<std::uint64_t> seen;
        std::vector<std::vector<std::uint16_t>> next;
        for (const auto& g : cur)
            for (std::uint32_t mask = 0; mask < (1u << (k - 1)); ++mask) {
                std::vector<std::uint16_t> h = g;
                h.push_back(static_cast<std::uint16_t>(mask));
                for (int v = 0; v < k - 1; ++v)
                    if (mask >> v & 1) h[v] |= static_cast<std::uint16_t>(1u << (k - 1));
                if (seen.insert(detail::canonical_code(h)).second) next.push_back(std::move(h));
            }
        cur = std::move(next);
    }
    std::vector<Graph> out;
    for (const auto& g : cur) {
        std::vector<std::pair<int, int>> e;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (g[u] >> v & 1) e.emplace_back(u, v);
        out.emplace_back(n, e);
    }
    return out;
}

inline bool is_connected(const Graph& G) {
    return G.n() == 0 || components(G).size() == 1;
}

}  // namespace treembed
