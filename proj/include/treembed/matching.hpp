#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

#include "graph.hpp"
#include "regularity.hpp"

namespace treembed {

// Independent set I, matching M and vertex-disjoint triangles Gamma
// partitioning V(H); V1/V2 split V(M) with every M-edge across and N(I) in V1.
struct ClusterDecomposition {
    VertexSet I;
    std::vector<std::pair<int, int>> M;
    std::vector<std::array<int, 3>> Gamma;
    VertexSet V1, V2;
    bool exact = false;  // produced by exhaustive maximisation
};

namespace detail {

struct CoverSearch {
    const Graph& H;
    int n;
    std::vector<std::uint32_t> nb;
    std::vector<std::pair<int, int>> M, bestM;
    std::vector<std::array<int, 3>> T, bestT;
    int best = -1;

    explicit CoverSearch(const Graph& h) : H(h), n(h.n()), nb(h.n(), 0) {
        for (int v = 0; v < n; ++v)
            for (int w : H.neighbors(v)) nb[v] |= 1u << w;
    }

    // open: undecided vertices; covered: count so far.
    void run(std::uint32_t open, int covered) {
        int bound = covered;
        for (std::uint32_t s = open; s; s &= s - 1) {
            int v = std::countr_zero(s);
            if (nb[v] & open) ++bound;
        }
        if (bound <= best) return;
        if (!open) {
            best = covered;
            bestM = M;
            bestT = T;
            return;
        }
        int v = std::countr_zero(open);
        std::uint32_t rest = open & ~(1u << v);
        for (std::uint32_t s = nb[v] & rest; s; s &= s - 1) {
            int u = std::countr_zero(s);
            M.emplace_back(v, u);
            run(rest & ~(1u << u), covered + 2);
            M.pop_back();
        }
        for (std::uint32_t s = nb[v] & rest; s; s &= s - 1) {
            int u = std::countr_zero(s);
            for (std::uint32_t r = nb[v] & nb[u] & rest & ~((2u << u) - 1); r; r &= r - 1) {
                int w = std::countr_zero(r);
                T.push_back({v, u, w});
                run(rest & ~(1u << u) & ~(1u << w), covered + 3);
                T.pop_back();
            }
        }
        run(rest, covered);
    }
};

// Each move strictly increases |V(M)| + |V(Gamma)|.
inline void improve_locally(const Graph& H, std::vector<std::pair<int, int>>& M, std::vector<std::array<int, 3>>& T) {
    const int n = H.n();
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<int> role(n, -1);  // -1 uncovered, 2*i: M-edge i, 2*i+1: triangle i
        for (std::size_t i = 0; i < M.size(); ++i) role[M[i].first] = role[M[i].second] = static_cast<int>(2 * i);
        for (std::size_t i = 0; i < T.size(); ++i)
            for (int v : T[i]) role[v] = static_cast<int>(2 * i + 1);
        for (int x = 0; x < n && !changed; ++x) {
            if (role[x] != -1) continue;
            for (int w : H.neighbors(x)) {
                if (role[w] == -1) {
                    M.emplace_back(x, w);
                    changed = true;
                    break;
                }
                if (role[w] % 2 == 1) {
                    auto tri = T[role[w] / 2];
                    T.erase(T.begin() + role[w] / 2);
                    std::vector<int> others;
                    for (int v : tri)
                        if (v != w) others.push_back(v);
                    M.emplace_back(x, w);
                    M.emplace_back(others[0], others[1]);
                    changed = true;
                    break;
                }
                auto [a, b] = M[role[w] / 2];
                int other = a == w ? b : a;
                if (H.adjacent(x, other)) {
                    M.erase(M.begin() + role[w] / 2);
                    T.push_back({x, a, b});
                    changed = true;
                    break;
                }
                bool done = false;
                for (int y : H.neighbors(other))
                    if (y != x && role[y] == -1) {
                        M.erase(M.begin() + role[w] / 2);
                        M.emplace_back(x, w);
                        M.emplace_back(y, other);
                        done = changed = true;
                        break;
                    }
                if (done) break;
            }
        }
    }
}

}  // namespace detail

inline constexpr int kExactDecompositionLimit = 24;

inline ClusterDecomposition matching_decomposition(const Graph& H) {
    const int n = H.n();
    ClusterDecomposition D;
    if (n <= kExactDecompositionLimit) {
        detail::CoverSearch s(H);
        s.run((1u << n) - 1, 0);
        D.M = s.bestM;
        D.Gamma = s.bestT;
        D.exact = true;
    } else {
        std::vector<char> used(n, 0);
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            for (int w : H.neighbors(v))
                if (!used[w]) {
                    D.M.emplace_back(v, w);
                    used[v] = used[w] = 1;
                    break;
                }
        }
        detail::improve_locally(H, D.M, D.Gamma);
    }
    for (auto& e : D.M)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(D.M.begin(), D.M.end());
    for (auto& t : D.Gamma) std::sort(t.begin(), t.end());
    std::sort(D.Gamma.begin(), D.Gamma.end());

    std::vector<char> covered(n, 0);
    for (auto [u, v] : D.M) covered[u] = covered[v] = 1;
    for (auto& t : D.Gamma)
        for (int v : t) covered[v] = 1;
    for (int v = 0; v < n; ++v)
        if (!covered[v]) D.I.push_back(v);
    auto inI = membership(n, D.I);
    for (auto [u, v] : D.M) {
        bool sees_u = count_neighbors_in(H, u, inI) > 0;
        bool sees_v = count_neighbors_in(H, v, inI) > 0;
        if (sees_v && !sees_u) std::swap(u, v);
        D.V1.push_back(u);
        D.V2.push_back(v);
    }
    std::sort(D.V1.begin(), D.V1.end());
    std::sort(D.V2.begin(), D.V2.end());

    auto inV1 = membership(n, D.V1);
    std::vector<int> hits(n, 0);
    for (int x : D.I)
        for (int w : H.neighbors(x)) {
            if (inI[w]) throw InvariantViolation("matching_decomposition: I is not independent");
            if (!inV1[w]) throw InvariantViolation("matching_decomposition: N(x) not inside V1");
        }
    for (auto [u, v] : D.M) {
        if (!H.adjacent(u, v)) throw InvariantViolation("matching_decomposition: M uses a non-edge");
        hits[u]++, hits[v]++;
    }
    for (auto& t : D.Gamma) {
        if (!H.adjacent(t[0], t[1]) || !H.adjacent(t[1], t[2]) || !H.adjacent(t[0], t[2]))
            throw InvariantViolation("matching_decomposition: Gamma holds a non-triangle");
        for (int v : t) hits[v]++;
    }
    for (int v = 0; v < n; ++v)
        if (hits[v] + inI[v] != 1) throw InvariantViolation("matching_decomposition: parts do not partition V(H)");
    return D;
}

// Result of halving every cluster: the matching M over half-clusters, the
// independent family C, and the V1/V2 sides of M.
struct RefinedMatching {
    RegularPartition partition;  // half clusters 2i and 2i+1 come from cluster i
    std::vector<std::pair<int, int>> M;
    std::vector<int> C;
    std::vector<int> V1, V2;
    std::int64_t covered_by_M = 0;  // |union of M clusters|
};

inline RefinedMatching refine_cluster_matching(const Graph& G, const RegularPartition& P, int t) {
    if (G.n() > 0 && degree_stats(G).min < t) throw ContractViolation("refine_cluster_matching: delta(G) < t");
    const int l = P.size();
    auto dens = P.density.empty() ? density_matrix(G, P.clusters) : P.density;
    std::vector<std::pair<int, int>> re;
    for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j)
            if (dens[i][j] > P.eta) re.emplace_back(i, j);
    Graph R(l, re);
    auto D = matching_decomposition(R);

    RefinedMatching out;
    for (const auto& c : P.clusters) {
        VertexSet s = c;
        std::sort(s.begin(), s.end());
        std::size_t h = (s.size() + 1) / 2;
        out.partition.clusters.emplace_back(s.begin(), s.begin() + h);
        out.partition.clusters.emplace_back(s.begin() + h, s.end());
    }
    out.partition.eps = 5 * P.eps;
    out.partition.eta = P.eta - P.eps;
    out.partition.density = density_matrix(G, out.partition.clusters);
    auto h1 = [](int c) { return 2 * c; };
    auto h2 = [](int c) { return 2 * c + 1; };
    auto inV1 = membership(l, D.V1);
    for (auto [c, d] : D.M) {
        out.M.emplace_back(h1(c), h1(d));
        out.M.emplace_back(h2(c), h2(d));
        for (int x : {c, d}) {
            (inV1[x] ? out.V1 : out.V2).push_back(h1(x));
            (inV1[x] ? out.V1 : out.V2).push_back(h2(x));
        }
    }
    for (auto& tri : D.Gamma) {
        auto [x, y, z] = tri;
        out.M.emplace_back(h1(x), h2(y));
        out.M.emplace_back(h1(y), h2(z));
        out.M.emplace_back(h1(z), h2(x));
        // every triangle edge joins a first half to a second half
        for (int v : {x, y, z}) {
            out.V1.push_back(h1(v));
            out.V2.push_back(h2(v));
        }
    }
    for (int x : D.I) {
        out.C.push_back(h1(x));
        out.C.push_back(h2(x));
    }
    std::sort(out.V1.begin(), out.V1.end());
    std::sort(out.V2.begin(), out.V2.end());
    for (auto [a, b] : out.M)
        out.covered_by_M += static_cast<std::int64_t>(out.partition.clusters[a].size() + out.partition.clusters[b].size());

    for (const auto& c : P.clusters)
        if (c.size() != P.clusters.front().size())
            throw InvariantViolation("refine_cluster_matching: input clusters differ in size");
    for (std::size_t i = 0; i + 1 < out.partition.clusters.size(); i += 2)
        if (out.partition.clusters[i].size() - out.partition.clusters[i + 1].size() > 1)
            throw InvariantViolation("refine_cluster_matching: halves differ by more than one");
    return out;
}

}  // namespace treembed
