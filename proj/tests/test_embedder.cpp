#include <gtest/gtest.h>

#include "treembed/generators.hpp"
#include "treembed/slice_engine.hpp"

using namespace treembed;

namespace {

struct BlowUp {
    Graph G;
    std::vector<VertexSet> clusters;
};

// Cluster i = [i m, (i+1) m); pairs along R-edges are random with edge chance num/den.
BlowUp blow_up(const Graph& R, int m, int num, int den, std::uint64_t seed) {
    Rng rng(seed);
    BlowUp b;
    std::vector<std::pair<int, int>> e;
    for (auto [x, y] : R.edges())
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (rng.chance(num, den)) e.emplace_back(x * m + i, y * m + j);
    b.G = Graph(R.n() * m, e);
    for (int c = 0; c < R.n(); ++c) {
        VertexSet s;
        for (int i = 0; i < m; ++i) s.push_back(c * m + i);
        b.clusters.push_back(s);
    }
    return b;
}

Graph cycle_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, e);
}

Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Graph(n, e);
}

EmbedderConfig desk_config() {
    EmbedderConfig cfg;
    cfg.policy = HypothesisPolicy::Warn;
    cfg.beta = Rational(1, 8);
    cfg.exact_walks = false;
    return cfg;
}

}  // namespace

TEST(EmbedderConfig, DerivedConstants) {
    auto half = EmbedderConfig::derive(Rational(1, 2), Rational(1, 10000));
    EXPECT_EQ(half.c, 67);
    EXPECT_EQ(half.d1, 10);
    EXPECT_EQ(half.d2, 22);
    EXPECT_EQ(half.c, 3 * half.d2 + 1);
    auto two_thirds = EmbedderConfig::derive(Rational(2, 3), Rational(1, 10000));
    EXPECT_EQ(two_thirds.c, 49);
    EXPECT_EQ(two_thirds.d1, 7);
    EXPECT_EQ(two_thirds.c, 3 * two_thirds.d2 + 1);
    EXPECT_EQ(half.eta, Rational(1, 20));
    EXPECT_THROW(EmbedderConfig::derive(Rational(1), Rational(1, 100)), ContractViolation);
}

TEST(EmbedderConfig, RationalSqrt) {
    EXPECT_EQ(rational_sqrt(Rational(1, 10000)), Rational(1, 100));
    EXPECT_EQ(rational_sqrt(Rational(9, 4)), Rational(3, 2));
    Rational r = rational_sqrt(Rational(1, 20));
    EXPECT_LE(r * r, Rational(1, 20));
    EXPECT_GT((r + Rational(1, 1'000'000'000)) * (r + Rational(1, 1'000'000'000)), Rational(1, 20));
    EXPECT_TRUE(degree_within_root(3, 81, 4));
    EXPECT_FALSE(degree_within_root(4, 81, 4));
    EXPECT_TRUE(degree_within_root(1, 2, 67));
}

TEST(EmbedIntoPair, RandomPairEmbedsSmallTrees) {
    auto b = blow_up(make_path(2).as_graph(), 120, 1, 2, 3);
    const auto& A = b.clusters[0];
    const auto& B = b.clusters[1];
    EmbedderConfig cfg;
    cfg.policy = HypothesisPolicy::Warn;
    Rng rng(11);
    for (int round = 0; round < 10; ++round) {
        RootedTree T = random_tree(20, 4, rng);
        auto r = embed_into_pair(b.G, A, B, A, B, {}, T, Rational(1, 20), cfg);
        ASSERT_TRUE(r.ok()) << to_json(r).dump();
        EXPECT_TRUE(verify_embedding(T, b.G, r.embedding->map));
        EXPECT_GE(r.trace.min_candidates, 12);  // 2 eps m
        EXPECT_FALSE(r.trace.warnings.empty());  // |T| > beta m at this scale
    }
    cfg.policy = HypothesisPolicy::Refuse;
    EXPECT_THROW(embed_into_pair(b.G, A, B, A, B, {}, make_path(20), Rational(1, 20), cfg), PreconditionError);
}

TEST(EmbedIntoPair, AvoidSetAndStarvation) {
    auto b = blow_up(make_path(2).as_graph(), 60, 1, 2, 5);
    const auto& A = b.clusters[0];
    const auto& B = b.clusters[1];
    EmbedderConfig cfg;
    cfg.policy = HypothesisPolicy::Warn;
    VertexSet Z(A.begin(), A.begin() + 20);
    auto r = embed_into_pair(b.G, A, B, A, B, Z, make_star(6), Rational(1, 20), cfg);
    ASSERT_TRUE(r.ok());
    auto inZ = membership(b.G.n(), Z);
    for (int h : r.embedding->map) EXPECT_FALSE(inZ[h]);
    // a star larger than any degree starves at level 1
    auto s = embed_into_pair(b.G, A, B, A, B, {}, make_star(59), Rational(1, 20), cfg);
    ASSERT_FALSE(s.ok());
    EXPECT_EQ(s.failure->stage, "pair");
    EXPECT_EQ(s.failure->starved_level, 1);
    // X\Z must stay above sqrt(eps) m
    VertexSet Zbig(A.begin(), A.begin() + 50);
    EXPECT_THROW(embed_into_pair(b.G, A, B, A, B, Zbig, make_path(3), Rational(1, 20), cfg), PreconditionError);
}

TEST(BipartiteComponent, EmbedsTreesIntoEvenCycleBlowUp) {
    auto b = blow_up(cycle_graph(6), 60, 3, 5, 7);
    auto cfg = desk_config();
    auto model = make_model(b.G, b.clusters, cfg.eta, RouteMode::Sides, Rational(1, 60));
    Rng rng(5);
    for (int round = 0; round < 8; ++round) {
        RootedTree T = random_tree(100, 4, rng);
        auto r = embed_bipartite_component(b.G, model, whole_tree(T), cfg);
        ASSERT_TRUE(r.ok()) << to_json(r).dump();
        EXPECT_TRUE(verify_embedding(T, b.G, r.embedding->map));
        // heavier colour class on X
        auto [k1, k2] = tree_bipartition_sizes(T);
        int onX = 0;
        for (int h : r.embedding->map) onX += model.side[h / 60] == 0;
        EXPECT_EQ(onX, std::max(k1, k2));
        EXPECT_EQ(r.trace.prefix_outside_L, 0);
    }
}

TEST(BipartiteComponent, CapacityAndShapeAreChecked) {
    auto b = blow_up(cycle_graph(4), 40, 3, 5, 9);
    auto cfg = desk_config();
    auto model = make_model(b.G, b.clusters, cfg.eta, RouteMode::Sides, Rational(1, 40));
    EXPECT_THROW(embed_bipartite_component(b.G, model, whole_tree(make_star(90)), cfg), PreconditionError);
    EXPECT_THROW(make_model(b.G, blow_up(cycle_graph(5), 40, 3, 5, 9).clusters, cfg.eta, RouteMode::Sides, 1),
                 ContractViolation);
    auto odd = blow_up(cycle_graph(5), 40, 3, 5, 9);
    EXPECT_THROW(make_model(odd.G, odd.clusters, cfg.eta, RouteMode::Sides, 1), PreconditionError);
    // refuse policy turns the asymptotic conditions into errors: 29^2 > 29 breaks Delta(T) <= k^(1/d)
    cfg.policy = HypothesisPolicy::Refuse;
    EXPECT_NO_THROW(embed_bipartite_component(b.G, model, whole_tree(make_path(30)), cfg));
    EXPECT_THROW(embed_bipartite_component(b.G, model, whole_tree(make_star(30)), cfg), PreconditionError);
}

TEST(BipartiteComponent, AvoidSetAndRootTargets) {
    auto b = blow_up(cycle_graph(4), 60, 3, 5, 13);
    auto cfg = desk_config();
    auto model = make_model(b.G, b.clusters, cfg.eta, RouteMode::Sides, Rational(1, 60));
    VertexSet avoid;
    for (int i = 0; i < 30; ++i) avoid.push_back(60 + i);
    Rng rng(3);
    RootedTree T = random_tree(60, 3, rng);
    ForestSpec F = whole_tree(T);
    F.root_target.assign(b.G.n(), 0);
    F.root_target[130] = F.root_target[131] = 1;
    auto r = embed_bipartite_component(b.G, model, F, cfg, avoid);
    ASSERT_TRUE(r.ok()) << to_json(r).dump();
    auto bad = membership(b.G.n(), avoid);
    for (int h : r.embedding->map) EXPECT_FALSE(bad[h]);
    int root_img = r.embedding->map[T.root()];
    EXPECT_TRUE(root_img == 130 || root_img == 131);
}

TEST(NonbipartiteComponent, PiecesStayInMatchedPairs) {
    auto b = blow_up(cycle_graph(5), 60, 3, 5, 17);
    auto cfg = desk_config();
    auto model = make_model(b.G, b.clusters, cfg.eta, RouteMode::Matching, Rational(1, 60));
    model.M = {{0, 1}, {2, 3}};
    Rng rng(21);
    for (int round = 0; round < 6; ++round) {
        RootedTree T = random_tree(90, 4, rng);
        auto r = embed_nonbipartite_component(b.G, model, whole_tree(T), cfg);
        ASSERT_TRUE(r.ok()) << to_json(r).dump();
        EXPECT_TRUE(verify_embedding(T, b.G, r.embedding->map));
        // C-slices of cluster 4 (unmatched) stay empty
        int c_in_4 = 0;
        for (int h : r.embedding->map) c_in_4 += h >= 4 * 60 + 12;
        EXPECT_EQ(c_in_4, 0);
        for (const auto& e : r.trace.balance) {
            // deviation never exceeds eps m plus the largest single-piece imbalance seen so far
            EXPECT_LE(e["deviation"].get<int>(), 60);
        }
    }
    auto bip = make_model(b.G, blow_up(cycle_graph(4), 60, 3, 5, 1).clusters, cfg.eta, RouteMode::Matching, 1);
    EXPECT_THROW(embed_nonbipartite_component(blow_up(cycle_graph(4), 60, 3, 5, 1).G, bip, whole_tree(make_path(5)), cfg),
                 std::exception);
}

TEST(NonbipartiteComponent, ExactWalksUseThreeDPlusOneSteps) {
    auto b = blow_up(complete_graph(3), 200, 3, 5, 23);
    auto cfg = desk_config();
    cfg.exact_walks = true;
    cfg.d = 1;
    cfg.beta = Rational(1, 20);
    auto model = make_model(b.G, b.clusters, cfg.eta, RouteMode::Matching, Rational(1, 200));
    model.M = {{0, 1}};
    Rng rng(2);
    RootedTree T = random_tree(60, 3, rng);
    auto r = embed_nonbipartite_component(b.G, model, whole_tree(T), cfg);
    ASSERT_TRUE(r.ok()) << to_json(r).dump();
    EXPECT_EQ(r.trace.prefix_outside_L, 0);
}

TEST(Connected, PhaseOneOnDenseBlowUp) {
    auto b = blow_up(complete_graph(4), 60, 1, 2, 29);
    ReducedGraph RG = build_reduced_graph(b.G, b.clusters, Rational(1, 10000), Rational(1, 20));
    auto cfg = desk_config();
    Rng rng(31);
    for (int round = 0; round < 5; ++round) {
        RootedTree T = random_tree(150, 4, rng);
        auto r = embed_connected(b.G, RG, {0, 1, 2, 3}, whole_tree(T), cfg, Rational(1, 60));
        ASSERT_TRUE(r.ok()) << to_json(r).dump();
        EXPECT_TRUE(verify_embedding(T, b.G, r.embedding->map));
    }
}

TEST(Connected, FailureCarriesDiagnostics) {
    // no vertex has 39 neighbours in the clustered part
    auto b = blow_up(make_path(4).as_graph(), 30, 1, 2, 37);
    ReducedGraph RG = build_reduced_graph(b.G, b.clusters, Rational(1, 10000), Rational(1, 20));
    auto cfg = desk_config();
    auto r = embed_connected(b.G, RG, {0, 1, 2, 3}, whole_tree(make_star(40)), cfg, Rational(1, 30));
    ASSERT_FALSE(r.ok());
    auto j = to_json(r);
    EXPECT_FALSE(j["failure"]["stage"].get<std::string>().empty());
    EXPECT_FALSE(j["failure"]["reason"].get<std::string>().empty());
    EXPECT_FALSE(r.trace.warnings.empty());
}
