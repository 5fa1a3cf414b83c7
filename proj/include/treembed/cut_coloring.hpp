#pragma once

#include <array>
#include <vector>

#include "tree_cut.hpp"

namespace treembed {

// Cut vertex z and a proper 2-colouring of T - z; color[z] == -1.
// Colour 0 is always the heavier class.
struct CutColoring {
    int z = -1;
    std::vector<int> color;
    int c0 = 0;
    int c1 = 0;
    int sigma = 0;
};

inline int imbalance(const CutColoring& c) { return c.c0 - c.c1; }

namespace detail {

inline std::vector<int> distance_parity(const RootedTree& T, int z) {
    std::vector<int> par(T.n(), -1);
    par[z] = 0;
    std::vector<int> stack{z};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        auto visit = [&](int w) {
            if (par[w] == -1) {
                par[w] = 1 - par[v];
                stack.push_back(w);
            }
        };
        for (int c : T.children(v)) visit(c);
        if (v != T.root()) visit(T.parent(v));
    }
    return par;
}

inline void finish_coloring(const RootedTree& T, CutColoring& c) {
    c.c0 = c.c1 = 0;
    for (int v = 0; v < T.n(); ++v) {
        if (v == c.z) continue;
        (c.color[v] == 0 ? c.c0 : c.c1)++;
    }
    if (c.c0 < c.c1) {
        for (int v = 0; v < T.n(); ++v)
            if (v != c.z) c.color[v] ^= 1;
        std::swap(c.c0, c.c1);
    }
    c.sigma = c.c0 - c.c1;
    for (int v = 0; v < T.n(); ++v)
        if (v != T.root() && v != c.z && T.parent(v) != c.z && c.color[v] == c.color[T.parent(v)])
            throw InvariantViolation("cut colouring is not proper");
}

inline int smallest_leaf(const RootedTree& T) {
    for (int v = 0; v < T.n(); ++v)
        if (T.is_leaf(v)) return v;
    throw InvariantViolation("tree without leaves");
}

}  // namespace detail

// z is the half separator; the components of T - z are grouped into forests
// F1, F2, F3 by partition_three, and the classes are assembled from the
// forests' colourings. Guarantees 4|c0| <= 3t-1 and 2|c1| <= t for t >= 2;
// for t = 1 the single other vertex forms c0.
inline CutColoring cut_coloring(const RootedTree& T) {
    if (T.n() < 2) throw ContractViolation("cut_coloring: tree needs at least 2 vertices");
    const int t = T.t();
    CutColoring c;
    c.z = half_separator(T, detail::smallest_leaf(T));
    auto comps = components_without(T, c.z);
    std::vector<std::int64_t> sizes;
    for (auto& comp : comps) sizes.push_back(static_cast<std::int64_t>(comp.size()));
    auto F = partition_three(sizes, t);
    auto base = detail::distance_parity(T, c.z);

    // local[v]: colour of v inside its forest F_j, oriented so that class 0
    // is the larger one; count[j] = {|c0^j|, |c1^j|}.
    std::vector<int> local(T.n(), -1);
    std::array<std::array<int, 2>, 3> count{};
    for (int j = 0; j < 3; ++j) {
        std::vector<int> flip(F.parts[j].size(), 0);
        std::array<int, 2> cnt{};
        int total = 0;
        for (int ci : F.parts[j])
            for (int v : comps[ci]) cnt[base[v]]++, total++;
        // A forest of singletons sees one colour only; flip one component so
        // that both colours occur.
        if (total >= 2 && (cnt[0] == 0 || cnt[1] == 0)) flip[0] = 1;
        cnt = {0, 0};
        for (std::size_t i = 0; i < F.parts[j].size(); ++i)
            for (int v : comps[F.parts[j][i]]) {
                local[v] = base[v] ^ flip[i];
                cnt[local[v]]++;
            }
        if (cnt[0] < cnt[1]) {
            for (int ci : F.parts[j])
                for (int v : comps[ci]) local[v] ^= 1;
            std::swap(cnt[0], cnt[1]);
        }
        count[j] = cnt;
    }
    const int F1 = count[0][0] + count[0][1];
    const bool case1 = 4 * count[0][0] >= 3 * F1 - 1;
    // Class 0: c0^1, c1^2, and c1^3 (case 1) or c0^3 (case 2).
    std::vector<int> group_of(T.n(), -1);
    for (int j = 0; j < 3; ++j)
        for (int ci : F.parts[j])
            for (int v : comps[ci]) group_of[v] = j;
    c.color.assign(T.n(), -1);
    for (int v = 0; v < T.n(); ++v) {
        if (v == c.z) continue;
        int j = group_of[v];
        bool in_c0 = j == 0 ? local[v] == 0 : j == 1 ? local[v] == 1 : (case1 ? local[v] == 1 : local[v] == 0);
        c.color[v] = in_c0 ? 0 : 1;
    }
    detail::finish_coloring(T, c);
    if (t >= 2 && (4 * c.c0 > 3 * t - 1 || 2 * c.c1 > t))
        throw InvariantViolation("cut_coloring: 4|c0| <= 3t-1 or 2|c1| <= t failed");
    return c;
}

// Cut colouring at a given z whose heavier class is as small as possible,
// found by subset-sum over per-component colour flips.
inline CutColoring best_coloring_at(const RootedTree& T, int z) {
    const int t = T.t();
    auto comps = components_without(T, z);
    auto base = detail::distance_parity(T, z);
    const std::size_t m = comps.size();
    std::vector<std::array<int, 2>> cnt(m, {0, 0});
    for (std::size_t i = 0; i < m; ++i)
        for (int v : comps[i]) cnt[i][base[v]]++;
    // reach[i][s]: first i components can put exactly s vertices in colour 0.
    std::vector<std::vector<char>> reach(m + 1, std::vector<char>(t + 1, 0));
    reach[0][0] = 1;
    for (std::size_t i = 0; i < m; ++i)
        for (int s = 0; s <= t; ++s) {
            if (!reach[i][s]) continue;
            reach[i + 1][s + cnt[i][0]] = 1;
            reach[i + 1][s + cnt[i][1]] = 1;
        }
    int best = -1;
    for (int s = 0; s <= t; ++s)
        if (reach[m][s] && (best < 0 || std::max(s, t - s) < std::max(best, t - best))) best = s;
    CutColoring c;
    c.z = z;
    c.color.assign(T.n(), -1);
    for (std::size_t i = m; i-- > 0;) {
        int flip = best >= cnt[i][0] && reach[i][best - cnt[i][0]] ? 0 : 1;
        for (int v : comps[i]) c.color[v] = base[v] ^ flip;
        best -= cnt[i][flip];
    }
    detail::finish_coloring(T, c);
    return c;
}

// Scans z = half separator first, then every vertex by id, and keeps the
// first colouring whose heavier class is smallest overall. Guarantees
// 3|c0| <= 2t and 2|c1| <= t for t >= 2.
inline CutColoring balanced_cut_coloring(const RootedTree& T) {
    if (T.n() < 2) throw ContractViolation("balanced_cut_coloring: tree needs at least 2 vertices");
    const int t = T.t();
    int z0 = half_separator(T, detail::smallest_leaf(T));
    CutColoring best = best_coloring_at(T, z0);
    for (int z = 0; z < T.n() && best.c0 * 2 > t + 1; ++z) {
        if (z == z0) continue;
        auto c = best_coloring_at(T, z);
        if (c.c0 < best.c0) best = std::move(c);
    }
    if (t >= 2 && (3 * best.c0 > 2 * t || 2 * best.c1 > t))
        throw InvariantViolation("balanced_cut_coloring: no z admits 3|c0| <= 2t");
    return best;
}

}  // namespace treembed
