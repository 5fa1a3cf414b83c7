#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "treembed/cut_coloring.hpp"
#include "treembed/tree_cut.hpp"
#include "treembed/tree_enum.hpp"

using namespace treembed;

namespace {

const std::vector<std::size_t> kFreeTrees = {1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551, 1301, 3159, 7741, 19320};

}  // namespace

TEST(TreeIO, ParentArrayRoundTrip) {
    RootedTree T = parse_tree("5; 1 1 1 2 2");
    EXPECT_EQ(T.root(), 1);
    EXPECT_EQ(T.children(2), (std::vector<int>{3, 4}));
    EXPECT_EQ(to_parent_array(T), "5; 1 1 1 2 2");
    EXPECT_EQ(T.levels().size(), 3u);
    EXPECT_THROW(parse_tree("3; 0 0"), ParseError);
    EXPECT_THROW(parse_tree("3; 1 2 0"), ParseError);
    RootedTree E = parse_tree("0 1\n1 2\n1 3\n");
    EXPECT_EQ(E.n(), 4);
    EXPECT_EQ(E.root(), 0);
    EXPECT_THROW(parse_tree("0 1\n1 2\n2 0\n"), ParseError);
}

TEST(TreeIO, CanonicalSequenceIsIsomorphismInvariant) {
    RootedTree a = RootedTree::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {2, 4}}, 0);
    RootedTree b = RootedTree::from_edges(5, {{4, 3}, {3, 0}, {0, 1}, {0, 2}}, 2);
    EXPECT_EQ(canonical_level_sequence(a), canonical_level_sequence(b));
    EXPECT_NE(canonical_level_sequence(a), canonical_level_sequence(make_path(5)));
    EXPECT_EQ(canonical_level_sequence(make_star(4)), "0 1 1 1");
}

TEST(TreeEnum, CountsMatchFreeTreeSequence) {
    for (int n = 1; n <= 16; ++n) {
        std::size_t count = 0;
        enumerate_trees(n, [&](const RootedTree& T) {
            ASSERT_EQ(T.n(), n);
            ++count;
        });
        EXPECT_EQ(count, kFreeTrees[n - 1]) << "n=" << n;
    }
    EXPECT_THROW(enumerate_trees(0, [](const RootedTree&) {}), ContractViolation);
    EXPECT_THROW(enumerate_trees(21, [](const RootedTree&) {}), ContractViolation);
}

TEST(TreeEnum, CrossCheckAgainstLabelledEnumeration) {
    for (int n = 1; n <= 8; ++n) EXPECT_EQ(oracle::count_free_trees_labelled(n), kFreeTrees[n - 1]);
    auto ext = oracle::count_free_trees_by_extension(11);
    for (int n = 1; n <= 11; ++n) EXPECT_EQ(ext[n], kFreeTrees[n - 1]);
}

TEST(TreeEnum, DistinctAndCentroidRooted) {
    for (int n = 1; n <= 12; ++n) {
        std::set<std::string> codes;
        for (const auto& T : all_trees(n)) {
            codes.insert(oracle::free_tree_code(n, T.edges()));
            auto c = centroids(T);
            ASSERT_TRUE(std::find(c.begin(), c.end(), T.root()) != c.end());
        }
        EXPECT_EQ(codes.size(), kFreeTrees[n - 1]);
    }
    auto four = all_trees(4);
    ASSERT_EQ(four.size(), 2u);
}

namespace {

void check_decomposition(const RootedTree& T, const Rational& beta) {
    auto D = decompose_pieces(T, beta);
    const std::int64_t t = T.t();
    std::vector<char> is_seed(T.n(), 0);
    for (int s : D.seeds) is_seed[s] = 1;
    ASSERT_TRUE(is_seed[T.root()]);
    auto comps = oracle::forest_components(T, is_seed);
    ASSERT_EQ(comps.size(), D.pieces.size());
    std::size_t covered = 0;
    for (const auto& P : D.pieces) {
        covered += P.vertices.size();
        ASSERT_LE(Rational(static_cast<std::int64_t>(P.vertices.size())), beta * Rational(t));
        for (int v : P.vertices) ASSERT_LE(T.depth(P.root), T.depth(v));
        ASSERT_TRUE(is_seed[P.attached_to]);
        ASSERT_EQ(T.parent(P.root), P.attached_to);
    }
    ASSERT_EQ(covered + D.seeds.size(), static_cast<std::size_t>(T.n()));
    ASSERT_LT(Rational(static_cast<std::int64_t>(D.seeds.size())), 1 / beta + 2);
    // order: element containing the parent comes first
    std::vector<int> pos(T.n(), -1);
    for (std::size_t i = 0; i < D.order.size(); ++i) {
        int e = D.order[i];
        if (e >= 0) pos[D.seeds[e]] = static_cast<int>(i);
        else
            for (int v : D.pieces[-1 - e].vertices) pos[v] = static_cast<int>(i);
    }
    for (int v = 0; v < T.n(); ++v)
        if (v != T.root()) ASSERT_LE(pos[T.parent(v)], pos[v]);
}

}  // namespace

TEST(Decompose, PathOfEleven) {
    RootedTree P = make_path(11);
    auto D = decompose_pieces(P, Rational(3, 10));
    for (auto& piece : D.pieces) EXPECT_LE(piece.vertices.size(), 3u);
    EXPECT_LE(D.seeds.size(), 5u);
    check_decomposition(P, Rational(3, 10));
}

TEST(Decompose, StarAndLargeBeta) {
    auto D = decompose_pieces(make_star(9), Rational(1, 4));
    EXPECT_EQ(D.seeds, std::vector<int>{0});
    EXPECT_EQ(D.pieces.size(), 8u);
    RootedTree T = make_path(6).rerooted(2);
    auto E = decompose_pieces(T, Rational(99, 100));
    EXPECT_EQ(E.seeds, std::vector<int>{2});
    EXPECT_EQ(E.pieces.size(), 2u);
    EXPECT_THROW(decompose_pieces(T, Rational(1)), ContractViolation);
}

TEST(Decompose, AllSmallTrees) {
    for (int n = 1; n <= 11; ++n)
        for (const auto& T : all_trees(n))
            for (Rational b : {Rational(1, 2), Rational(1, 3), Rational(1, 5)}) check_decomposition(T, b);
}

TEST(HalfSeparator, Examples) {
    RootedTree star = make_star(7);
    EXPECT_EQ(half_separator(star, 3), 0);
    RootedTree p7 = make_path(7);
    int z = half_separator(p7, 0);
    EXPECT_EQ(z, 3);
    auto comps = components_without(p7, z);
    ASSERT_EQ(comps.size(), 2u);
    EXPECT_EQ(comps[0].size(), 3u);
    EXPECT_EQ(comps[1].size(), 3u);
    EXPECT_THROW(half_separator(p7, 3), ContractViolation);

    RootedTree spider = oracle::sharpness_spider(8);
    int s = half_separator(spider, 0);
    std::vector<std::size_t> sizes;
    for (auto& c : components_without(spider, s)) sizes.push_back(c.size());
    EXPECT_EQ(sizes, (std::vector<std::size_t>{4, 4}));
    // One component induces a path, the other a star centred at the path end.
    int path_like = 0, star_like = 0;
    for (auto& comp : components_without(spider, s)) {
        std::vector<int> deg(spider.n(), 0);
        for (auto [u, v] : spider.edges())
            if (std::count(comp.begin(), comp.end(), u) && std::count(comp.begin(), comp.end(), v)) deg[u]++, deg[v]++;
        int mx = 0;
        for (int v : comp) mx = std::max(mx, deg[v]);
        if (mx <= 2) ++path_like;
        if (mx == static_cast<int>(comp.size()) - 1) ++star_like;
    }
    EXPECT_EQ(path_like, 1);
    EXPECT_EQ(star_like, 1);
}

TEST(HalfSeparator, AllSmallTreesEveryLeaf) {
    for (int n = 2; n <= 12; ++n)
        for (const auto& T : all_trees(n))
            for (int x = 0; x < n; ++x) {
                if (!T.is_leaf(x)) continue;
                int z = half_separator(T, x);
                int t = T.t();
                RootedTree Tx = T.rerooted(x);
                int maximal = 0;
                for (int v = 0; v < n; ++v) {
                    bool heavy = Tx.subtree_size(v) > t / 2;
                    bool child_heavy = false;
                    for (int c : Tx.children(v)) child_heavy |= Tx.subtree_size(c) > t / 2;
                    if (heavy && !child_heavy) ++maximal;
                }
                ASSERT_EQ(maximal, 1);
                std::vector<char> rem(n, 0);
                rem[z] = 1;
                for (auto& comp : oracle::forest_components(T, rem)) {
                    bool has_x = std::find(comp.begin(), comp.end(), x) != comp.end();
                    ASSERT_LE(static_cast<int>(comp.size()), has_x ? (t + 1) / 2 : t / 2);
                }
            }
}

namespace {

// Largest subset sum of `a` restricted to `allowed`, not above cap.
std::int64_t brute_max(const std::vector<std::int64_t>& a, const std::vector<int>& allowed, std::int64_t cap) {
    std::int64_t best = 0;
    for (std::size_t m = 0; m < (std::size_t{1} << allowed.size()); ++m) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < allowed.size(); ++i)
            if (m >> i & 1) s += a[allowed[i]];
        if (s <= cap) best = std::max(best, s);
    }
    return best;
}

}  // namespace

TEST(Partition, Examples) {
    auto p = partition_three({3, 3, 2, 2}, 10);
    EXPECT_EQ(p.sums, (std::vector<std::int64_t>{5, 5, 0}));
    EXPECT_TRUE(p.parts[2].empty());
    auto q = partition_three({5}, 10);
    EXPECT_EQ(q.parts[0], std::vector<int>{0});
    EXPECT_TRUE(q.parts[1].empty() && q.parts[2].empty());
    auto r = partition_three({4, 4, 4}, 12);
    EXPECT_EQ(r.sums, (std::vector<std::int64_t>{4, 4, 4}));
    EXPECT_EQ(r.parts[2].size(), 1u);

    EXPECT_EQ(partition_two({3, 3, 2, 2}, 10).sums, (std::vector<std::int64_t>{5, 5}));
    auto s = partition_two({1}, 2);
    EXPECT_EQ(s.parts[0], std::vector<int>{0});
    EXPECT_TRUE(s.parts[1].empty());
    auto u = partition_two({6, 3, 3}, 12);
    EXPECT_LE(3 * u.sums[0], 24);
    EXPECT_EQ(u.sums[0] + u.sums[1], 12);
    auto w = partition_two({4, 4, 4}, 12);
    EXPECT_EQ(w.sums, (std::vector<std::int64_t>{8, 4}));

    try {
        partition_three({7, 1}, 12);
        FAIL();
    } catch (const ContractViolation& e) {
        EXPECT_NE(std::string(e.what()).find("a_0 = 7"), std::string::npos);
    }
    EXPECT_THROW(partition_three({3, 3, 3}, 8), ContractViolation);
    EXPECT_THROW(partition_three({0, 2}, 8), ContractViolation);
}

TEST(Partition, MatchesBruteForce) {
    Rng rng(11);
    for (int iter = 0; iter < 3000; ++iter) {
        std::int64_t t = rng.range(1, 30);
        std::int64_t cap = (t + 1) / 2, left = t;
        std::vector<std::int64_t> a;
        int m = rng.range(0, 10);
        for (int i = 0; i < m && left > 0; ++i) {
            std::int64_t x = rng.range(1, static_cast<int>(std::min(cap, left)));
            a.push_back(x);
            left -= x;
        }
        auto P = partition_three(a, t);
        std::vector<int> all(a.size());
        std::iota(all.begin(), all.end(), 0);
        ASSERT_EQ(P.sums[0], brute_max(a, all, cap));
        std::vector<int> rest;
        for (int i : all)
            if (std::find(P.parts[0].begin(), P.parts[0].end(), i) == P.parts[0].end()) rest.push_back(i);
        ASSERT_EQ(P.sums[1], brute_max(a, rest, cap));
        auto Q = partition_two(a, t);
        ASSERT_LE(Q.sums[1], Q.sums[0]);
        if (t >= 2) ASSERT_LE(3 * Q.sums[0], 2 * t);
    }
}

namespace {

void check_proper(const RootedTree& T, const CutColoring& c) {
    ASSERT_EQ(c.color[c.z], -1);
    int n0 = 0, n1 = 0;
    for (int v = 0; v < T.n(); ++v) {
        if (v == c.z) continue;
        ASSERT_TRUE(c.color[v] == 0 || c.color[v] == 1);
        (c.color[v] ? n1 : n0)++;
        int p = T.parent(v);
        if (v != T.root() && p != c.z) ASSERT_NE(c.color[v], c.color[p]);
    }
    ASSERT_EQ(n0, c.c0);
    ASSERT_EQ(n1, c.c1);
    ASSERT_GE(c.c0, c.c1);
    ASSERT_EQ(imbalance(c), c.c0 - c.c1);
}

}  // namespace

TEST(CutColoring, Examples) {
    auto p5 = cut_coloring(make_path(5));
    EXPECT_EQ(p5.c0, 2);
    EXPECT_EQ(p5.c1, 2);
    auto edge = cut_coloring(make_path(2));
    EXPECT_EQ(edge.c0, 1);
    EXPECT_EQ(edge.c1, 0);
    EXPECT_THROW(cut_coloring(make_path(1)), ContractViolation);

    RootedTree spider = oracle::sharpness_spider(8);
    auto c = cut_coloring(spider);
    EXPECT_EQ(c.z, half_separator(spider, 0));
    EXPECT_EQ(c.c0, 5);
    EXPECT_EQ(oracle::min_heavier_class(spider, c.z), 5);
}

TEST(CutColoring, AllSmallTrees) {
    for (int n = 3; n <= 12; ++n)
        for (const auto& T : all_trees(n)) {
            int t = T.t();
            auto c = cut_coloring(T);
            check_proper(T, c);
            ASSERT_LE(4 * c.c0, 3 * t - 1);
            ASSERT_LE(2 * c.c1, t);
            auto b = balanced_cut_coloring(T);
            check_proper(T, b);
            ASSERT_LE(3 * b.c0, 2 * t);
            ASSERT_LE(2 * b.c1, t);
        }
}

TEST(BalancedCutColoring, Examples) {
    RootedTree spider = oracle::sharpness_spider(8);
    auto b = balanced_cut_coloring(spider);
    EXPECT_LE(3 * b.c0, 16);
    EXPECT_EQ(b.c0, 4);
    EXPECT_NE(b.z, half_separator(spider, 0));
    auto p7 = balanced_cut_coloring(make_path(7));
    EXPECT_LE(p7.c0, 4);
    EXPECT_LE(p7.c1, 3);
    auto star = balanced_cut_coloring(make_star(10));
    EXPECT_EQ(star.z, 0);
    EXPECT_LE(3 * star.c0, 18);
    auto edge = balanced_cut_coloring(make_path(2));
    EXPECT_EQ(edge.c0 + edge.c1, 1);
}

TEST(Imbalance, Examples) {
    CutColoring c;
    c.c0 = 5, c.c1 = 3;
    EXPECT_EQ(imbalance(c), 2);
    c.c0 = 4, c.c1 = 4;
    EXPECT_EQ(imbalance(c), 0);
    auto sizes = tree_bipartition_sizes(make_path(7));
    EXPECT_EQ(sizes.first - sizes.second, 1);
    EXPECT_EQ(tree_bipartition_sizes(make_star(9)), std::make_pair(8, 1));
    EXPECT_EQ(tree_bipartition_sizes(make_path(6)), std::make_pair(3, 3));
}
