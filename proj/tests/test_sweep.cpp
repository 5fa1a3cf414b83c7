#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "treembed/sweep.hpp"

using namespace treembed;

namespace {

// Brute force over injective maps, independent of the oracle's pruning.
bool brute_embeds(const RootedTree& T, const Graph& G) {
    std::vector<int> phi(T.n(), -1);
    std::vector<char> used(G.n(), 0);
    auto order = T.preorder();
    std::function<bool(std::size_t)> go = [&](std::size_t i) {
        if (i == order.size()) return true;
        int v = order[i];
        for (int h = 0; h < G.n(); ++h) {
            if (used[h]) continue;
            if (v != T.root() && !G.adjacent(phi[T.parent(v)], h)) continue;
            phi[v] = h, used[h] = 1;
            if (go(i + 1)) return true;
            used[h] = 0;
        }
        phi[v] = -1;
        return false;
    };
    return go(0);
}

}  // namespace

TEST(Sweep, TotalsCoverTheGrid) {
    SweepParams s;
    s.conj = Conjecture::TwoKHalf;
    s.kmin = 1;
    s.kmax = 4;
    auto hosts = extremal_adjacent_hosts(4);
    auto rep = sweep_conjecture(s, hosts);
    EXPECT_EQ(rep.points.size(), 4 * hosts.size());
    int sum = 0;
    for (auto& [_, v] : rep.totals()) sum += v;
    EXPECT_EQ(sum, static_cast<int>(rep.points.size()));
    EXPECT_EQ(rep.totals().at("NotEmbeddable"), 0);
    EXPECT_GT(rep.totals().at("Embedded"), 0);
}

TEST(Sweep, OutcomesAgreeWithBruteForce) {
    SweepParams s;
    s.conj = Conjecture::ErdosSos;
    s.kmin = 1;
    s.kmax = 4;
    auto hosts = all_small_graphs(5);
    auto rep = sweep_conjecture(s, hosts);
    int checked = 0;
    for (const auto& p : rep.points) {
        auto [ok, _] = conjecture_hypothesis(s, hosts[p.host].G, p.k);
        ASSERT_EQ(ok, p.outcome != Outcome::HypothesisNotMet);
        for (const auto& r : p.trees) {
            auto T = parse_tree(r.tree);
            ASSERT_EQ(brute_embeds(T, hosts[p.host].G), r.status == OracleStatus::Found) << r.tree;
            ++checked;
        }
    }
    EXPECT_GT(checked, 50);
    EXPECT_TRUE(rep.counterexamples.empty());
}

TEST(Sweep, ThreadCountDoesNotChangeTheReport) {
    SweepParams s;
    s.conj = Conjecture::TwoKHalf;
    s.kmin = 6;
    s.kmax = 6;
    auto hosts = random_degree_hosts(40, 3, 12, 7);
    auto one = sweep_conjecture(s, hosts);
    s.jobs = 3;
    auto three = sweep_conjecture(s, hosts);
    EXPECT_EQ(to_json(one).dump(), to_json(three).dump());
    EXPECT_EQ(one.totals().at("HypothesisNotMet"), 0);
}

TEST(Sweep, WeakenedSpiderHostIsACounterexample) {
    SweepParams s;
    s.conj = Conjecture::TwoKHalf;
    s.kmin = 36;
    s.kmax = 36;
    s.weaken = Rational(1, 3);
    auto hosts = example1_hosts();
    hosts.resize(1);
    auto rep = sweep_conjecture(s, hosts);
    ASSERT_EQ(rep.points.size(), 1u);
    EXPECT_EQ(rep.points[0].outcome, Outcome::NotEmbeddable);
    ASSERT_EQ(rep.counterexamples.size(), 1u);
    s.weaken.reset();
    EXPECT_EQ(sweep_conjecture(s, hosts).points[0].outcome, Outcome::HypothesisNotMet);
}

TEST(Sweep, ConstDeltaFiltersTrees) {
    SweepParams s;
    s.conj = Conjecture::ConstDelta;
    s.Delta = 2;
    s.kmin = 5;
    s.kmax = 5;
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) e.emplace_back(i, j);
    std::vector<HostCase> hosts{{"K6", Graph(6, e), std::nullopt}};
    auto rep = sweep_conjecture(s, hosts);
    ASSERT_EQ(rep.points.size(), 1u);
    ASSERT_EQ(rep.points[0].trees.size(), 1u);  // only the path
    EXPECT_EQ(rep.points[0].outcome, Outcome::Embedded);
}

TEST(Sweep, CsvHasOneRowPerPoint) {
    SweepParams s;
    s.kmin = 1;
    s.kmax = 2;
    auto hosts = extremal_adjacent_hosts(2);
    auto rep = sweep_conjecture(s, hosts);
    auto csv = to_csv(rep);
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), rep.points.size() + 1);
}
