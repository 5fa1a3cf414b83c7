#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "rational.hpp"
#include "tree.hpp"

namespace treembed {

struct Piece {
    int root;                // vertex of the piece closest to r(T)
    int attached_to;         // parent of `root`; always a seed
    std::vector<int> vertices;  // preorder of T restricted to the piece
};

// Seeds S and pieces (components of T - S). `order` lists every element
// after the one holding its parent: >= 0 is a seed index, -1 - i is piece i.
struct Decomposition {
    std::vector<int> seeds;
    std::vector<Piece> pieces;
    std::vector<int> order;
    std::vector<int> piece_of;  // vertex -> piece index, -1 for seeds
};

// Repeatedly cut off a maximal subtree with more than beta*t vertices (its
// top vertex becomes a seed), then add the root. The first qualifying vertex
// in post-order is maximal since everything below it was scanned already.
inline Decomposition decompose_pieces(const RootedTree& T, const Rational& beta) {
    if (beta <= 0 || beta >= 1) throw ContractViolation("decompose_pieces: beta must lie in (0,1)");
    const int n = T.n();
    const std::int64_t t = T.t();
    auto heavy = [&](std::int64_t size) { return Rational(size) > beta * Rational(t); };

    std::vector<char> removed(n, 0), is_seed(n, 0);
    std::vector<int> seeds;
    for (;;) {
        std::vector<int> size(n, 0);
        int pick = -1;
        for (int v : T.postorder()) {
            if (removed[v]) continue;
            size[v] = 1;
            for (int c : T.children(v))
                if (!removed[c]) size[v] += size[c];
            if (heavy(size[v])) {
                pick = v;
                break;
            }
        }
        if (pick == -1) break;
        seeds.push_back(pick);
        is_seed[pick] = 1;
        std::vector<int> stack{pick};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            removed[v] = 1;
            for (int c : T.children(v))
                if (!removed[c]) stack.push_back(c);
        }
        if (pick == T.root()) break;
    }
    if (!is_seed[T.root()]) {
        seeds.push_back(T.root());
        is_seed[T.root()] = 1;
    }

    Decomposition D;
    D.piece_of.assign(n, -1);
    std::vector<int> seed_index(n, -1);
    for (int v : T.preorder()) {
        if (is_seed[v]) {
            seed_index[v] = static_cast<int>(D.seeds.size());
            D.seeds.push_back(v);
            D.order.push_back(seed_index[v]);
        } else if (is_seed[T.parent(v)]) {
            int idx = static_cast<int>(D.pieces.size());
            D.pieces.push_back({v, T.parent(v), {}});
            D.order.push_back(-1 - idx);
            D.piece_of[v] = idx;
        } else {
            D.piece_of[v] = D.piece_of[T.parent(v)];
        }
    }
    for (int v : T.preorder())
        if (D.piece_of[v] >= 0) D.pieces[D.piece_of[v]].vertices.push_back(v);

    // (i)-(iv)
    if (!is_seed[T.root()]) throw InvariantViolation("decomposition: root is not a seed");
    for (const auto& P : D.pieces)
        if (heavy(static_cast<std::int64_t>(P.vertices.size())))
            throw InvariantViolation("decomposition: piece larger than beta*t");
    if (Rational(static_cast<std::int64_t>(D.seeds.size())) * beta >= 1 + 2 * beta)
        throw InvariantViolation("decomposition: |S| >= 1/beta + 2");
    return D;
}

// Root at leaf x and return the maximal z with |T(z)| > floor(t/2).
inline int half_separator(const RootedTree& T, int x) {
    if (T.n() < 2) throw ContractViolation("half_separator: tree needs at least 2 vertices");
    if (x < 0 || x >= T.n() || !T.is_leaf(x)) throw ContractViolation("half_separator: x is not a leaf");
    RootedTree Tx = T.root() == x ? T : T.rerooted(x);
    const int half = T.t() / 2;
    for (int v : Tx.postorder())
        if (Tx.subtree_size(v) > half) return v;
    throw InvariantViolation("half_separator: no heavy vertex");
}

// Components of T - z, each listed in preorder from its vertex next to z.
inline std::vector<std::vector<int>> components_without(const RootedTree& T, int z) {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(T.n(), 0);
    seen[z] = 1;
    std::vector<int> nbrs = T.children(z);
    if (z != T.root()) nbrs.insert(nbrs.begin(), T.parent(z));
    std::sort(nbrs.begin(), nbrs.end());
    for (int s : nbrs) {
        std::vector<int> comp;
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            std::vector<int> adj = T.children(v);
            if (v != T.root()) adj.push_back(T.parent(v));
            for (auto it = adj.rbegin(); it != adj.rend(); ++it)
                if (!seen[*it]) {
                    seen[*it] = 1;
                    stack.push_back(*it);
                }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

struct SequencePartition {
    std::vector<std::vector<int>> parts;  // 0-based indices into the input
    std::vector<std::int64_t> sums;
};

namespace detail {

// Subset of `pool` with the largest sum not exceeding cap; ties go to the
// subset found first when scanning indices in increasing order.
inline std::vector<int> max_sum_subset(const std::vector<std::int64_t>& a, const std::vector<int>& pool, std::int64_t cap) {
    std::vector<int> from(cap + 1, -2);  // -2 unreachable, -1 empty set, else last pool position used
    from[0] = -1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        std::int64_t w = a[pool[i]];
        for (std::int64_t s = cap; s >= w; --s)
            if (from[s] == -2 && from[s - w] != -2) from[s] = static_cast<int>(i);
    }
    std::int64_t best = cap;
    while (from[best] == -2) --best;
    std::vector<int> chosen;
    for (std::int64_t s = best; s > 0;) {
        int i = from[s];
        chosen.push_back(pool[i]);
        s -= a[pool[i]];
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

inline void check_sequence(const std::vector<std::int64_t>& a, std::int64_t t) {
    std::int64_t cap = (t + 1) / 2, sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] <= 0) throw ContractViolation("a_" + std::to_string(i) + " = " + std::to_string(a[i]) + " is not positive");
        if (a[i] > cap)
            throw ContractViolation("a_" + std::to_string(i) + " = " + std::to_string(a[i]) + " exceeds ceil(t/2) = " +
                                    std::to_string(cap));
        sum += a[i];
    }
    if (sum > t) throw ContractViolation("sum of a_i = " + std::to_string(sum) + " exceeds t = " + std::to_string(t));
}

inline std::int64_t sum_of(const std::vector<std::int64_t>& a, const std::vector<int>& idx) {
    std::int64_t s = 0;
    for (int i : idx) s += a[i];
    return s;
}

}  // namespace detail

// I1, I2: successive maximum-sum subsets with sum <= ceil(t/2); I3: the rest.
inline SequencePartition partition_three(const std::vector<std::int64_t>& a, std::int64_t t) {
    detail::check_sequence(a, t);
    const std::int64_t cap = (t + 1) / 2;
    std::vector<int> pool(a.size());
    std::iota(pool.begin(), pool.end(), 0);
    SequencePartition P;
    for (int round = 0; round < 2; ++round) {
        auto I = detail::max_sum_subset(a, pool, cap);
        std::vector<int> rest;
        std::set_difference(pool.begin(), pool.end(), I.begin(), I.end(), std::back_inserter(rest));
        pool = rest;
        P.parts.push_back(I);
    }
    P.parts.push_back(pool);
    for (auto& I : P.parts) P.sums.push_back(detail::sum_of(a, I));
    if (!(P.sums[2] <= P.sums[1] && P.sums[1] <= P.sums[0] && P.sums[0] <= cap) || P.parts[2].size() > 1)
        throw InvariantViolation("partition_three: sum ordering or |I3| <= 1 failed");
    return P;
}

// J1 = I1, J2 = I2 if I3 is empty; otherwise {I1, I2 u I3} ordered by sum.
inline SequencePartition partition_two(const std::vector<std::int64_t>& a, std::int64_t t) {
    auto P3 = partition_three(a, t);
    SequencePartition P;
    if (P3.parts[2].empty()) {
        P.parts = {P3.parts[0], P3.parts[1]};
    } else {
        std::vector<int> merged = P3.parts[1];
        merged.insert(merged.end(), P3.parts[2].begin(), P3.parts[2].end());
        std::sort(merged.begin(), merged.end());
        if (detail::sum_of(a, merged) > P3.sums[0])
            P.parts = {merged, P3.parts[0]};
        else
            P.parts = {P3.parts[0], merged};
    }
    for (auto& J : P.parts) P.sums.push_back(detail::sum_of(a, J));
    // For t = 1 the single part of size 1 exceeds 2t/3; no partition can do better.
    if (P.sums[1] > P.sums[0] || (t >= 2 && 3 * P.sums[0] > 2 * t))
        throw InvariantViolation("partition_two: sums exceed 2t/3 or are out of order");
    return P;
}

}  // namespace treembed
