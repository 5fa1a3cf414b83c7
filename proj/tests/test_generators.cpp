#include <gtest/gtest.h>

#include <chrono>

#include "treembed/generators.hpp"
#include "treembed/oracle.hpp"

using namespace treembed;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

OracleStatus decide(const LabeledInstance& inst) { return embeds(*inst.pattern, inst.host).status; }

}  // namespace

TEST(SpiderHost, ClosedFormCounts) {
    int admissible = 0;
    for (int den = 2; den <= 24; ++den)
        for (int num = 1; num < den; ++num)
            for (int s = 1; s * s <= 200; ++s) {
                Rational eps(num, den);
                int k = s * s;
                Rational a = (1 - eps) * k;
                if (a.denominator() != 1 || (a / 2).denominator() != 1) {
                    EXPECT_THROW(gen_spider_host(eps, k), ContractViolation);
                    continue;
                }
                auto inst = gen_spider_host(eps, k);
                int A = static_cast<int>(a.numerator());
                EXPECT_EQ(inst.host.n(), 2 * (A + A / 2) + 1);
                EXPECT_EQ(inst.pattern->n(), k + 1);
                EXPECT_EQ(inst.host.degree(0), 2 * A);
                ++admissible;
            }
    EXPECT_GT(admissible, 100);
    EXPECT_THROW(gen_spider_host(Rational(1, 3), 35), ContractViolation);
}

TEST(SpiderHost, PaperInstances) {
    auto t0 = std::chrono::steady_clock::now();
    auto refuted = gen_spider_host(Rational(1, 3), 36);
    EXPECT_EQ(refuted.host.n(), 73);
    EXPECT_EQ(refuted.claim, Claim::NotEmbeddable);
    EXPECT_EQ(decide(refuted), OracleStatus::NotFound);
    EXPECT_LT(seconds_since(t0), 60.0);

    auto boundary = gen_spider_host(Rational(1, 4), 16);
    EXPECT_EQ(boundary.claim, Claim::Unspecified);
    EXPECT_EQ(decide(boundary), OracleStatus::Found);

    // k > 1/eps^2 alone is not enough: the centre fits in a large side here.
    auto loose = gen_spider_host(Rational(3, 16), 64);
    EXPECT_EQ(loose.claim, Claim::Unspecified);
    EXPECT_EQ(decide(loose), OracleStatus::Found);
}

TEST(SpiderHost, ClaimMatchesOracleOnSmallHosts) {
    int refuted = 0;
    for (int den = 2; den <= 12; ++den)
        for (int num = 1; num < den; ++num)
            for (int s = 2; s <= 7; ++s) {
                Rational eps(num, den);
                if (boost::gcd(num, den) != 1) continue;
                int k = s * s;
                Rational a = (1 - eps) * k;
                if (a.denominator() != 1 || (a / 2).denominator() != 1) continue;
                auto inst = gen_spider_host(eps, k);
                if (inst.host.n() > 100) continue;
                auto st = decide(inst);
                ASSERT_NE(st, OracleStatus::BudgetExceeded);
                if (inst.claim == Claim::NotEmbeddable) {
                    EXPECT_EQ(st, OracleStatus::NotFound) << to_string(eps) << " " << k;
                    ++refuted;
                }
            }
    EXPECT_GT(refuted, 0);
}

TEST(DeltaExample, ShapeIdentities) {
    for (int delta = 2; delta <= 5; ++delta)
        for (int k = (delta + 1) * (delta + 1); k <= 400; k += delta + 1) {
            Rational a = Rational(delta * delta, (delta + 1) * (delta + 1)) * k;
            Rational b = Rational(delta, 2 * (delta + 1)) * k;
            if (a.denominator() != 1 || b.denominator() != 1) {
                EXPECT_THROW(gen_delta_example(delta, k), ContractViolation);
                continue;
            }
            auto inst = gen_delta_example(delta, k);
            const RootedTree& T = *inst.pattern;
            EXPECT_EQ(T.n(), k + 1);
            EXPECT_EQ(T.degree(T.root()), delta + 1);
            EXPECT_EQ(T.max_degree(), delta + 1);
            int even = 0;
            for (int v = 0; v < T.n(); ++v) {
                even += T.depth(v) % 2 == 0;
                if (T.depth(v) % 2 == 1) EXPECT_EQ(T.degree(v), delta + 1);
                else if (v != T.root()) EXPECT_LE(T.degree(v), 2);
            }
            EXPECT_EQ(even, delta * k / (delta + 1) + 1);
            EXPECT_EQ(T.height() % 2, 0);
            EXPECT_EQ(inst.host.degree(0), 2 * static_cast<int>(a.numerator()));
        }
}

TEST(DeltaExample, ClaimsMatchOracleOnHostsUpToHundredVertices) {
    int refuted = 0, embedded = 0;
    for (int delta = 2; delta <= 4; ++delta)
        for (int k = (delta + 1) * (delta + 1); k <= 100; k += delta + 1) {
            LabeledInstance inst;
            try {
                inst = gen_delta_example(delta, k);
            } catch (const ContractViolation&) {
                continue;
            }
            if (inst.host.n() > 100) continue;
            auto st = decide(inst);
            if (delta % 2 == 0) {
                EXPECT_EQ(inst.claim, Claim::NotEmbeddable);
                EXPECT_EQ(st, OracleStatus::NotFound) << delta << " " << k;
                ++refuted;
            } else {
                // root on the apex, two branches per lobe, B sides exactly full
                EXPECT_EQ(inst.claim, Claim::Unspecified);
                EXPECT_EQ(st, OracleStatus::Found) << delta << " " << k;
                ++embedded;
            }
        }
    // delta = 2: k = 9, 18, ..., 63; delta = 4: k = 25; delta = 3: k = 16, 32, 48
    EXPECT_EQ(refuted, 8);
    EXPECT_EQ(embedded, 3);
    auto k18 = gen_delta_example(2, 18);
    EXPECT_EQ(k18.host.n(), 2 * (8 + 6) + 1);
}

TEST(TwoThirdsHosts, NineAndBeyond) {
    for (int k : {9, 12, 15}) {
        auto t0 = std::chrono::steady_clock::now();
        auto all = gen_two_thirds_hosts(k);
        ASSERT_EQ(all.size(), 7u);
        for (const auto& inst : all) {
            EXPECT_EQ(inst.pattern->n(), k + 1);
            int maxdeg = 0;
            for (int v = 0; v < inst.host.n(); ++v) maxdeg = std::max(maxdeg, inst.host.degree(v));
            EXPECT_EQ(inst.host.degree(0), maxdeg);
            auto start = std::chrono::steady_clock::now();
            if (inst.claim == Claim::NotEmbeddable) {
                EXPECT_EQ(decide(inst), OracleStatus::NotFound) << k << " " << inst.params.dump();
            }
            if (k == 9) EXPECT_LT(seconds_since(start), 10.0);
        }
        (void)t0;
    }
    EXPECT_THROW(gen_two_thirds_hosts(10), ContractViolation);
}

TEST(TwoThirdsHosts, LargerLobesLoseTheClaim) {
    const int k = 12, q = 8;
    auto grown = gen_two_thirds_hosts(k, q - 1, q - 2);
    for (const auto& inst : grown) {
        std::string host = inst.params["host"];
        if (host == "c" || host == "d") EXPECT_EQ(inst.claim, Claim::Unspecified);
    }
    // with one more vertex in every side the three-star spider fits again
    EXPECT_EQ(decide(grown[3]), OracleStatus::Found);
}

TEST(ErdosSosExtremal, Families) {
    auto fam = gen_erdos_sos_extremal(12, 4);
    ASSERT_EQ(fam.size(), 3u);
    EXPECT_EQ(components(fam[0].host).size(), 3u);
    EXPECT_EQ(degree_stats(fam[0].host).average, Rational(3));  // k - 1
    for (const auto& inst : fam) EXPECT_EQ(decide(inst), OracleStatus::NotFound);

    auto ten = gen_erdos_sos_extremal(10, 6);
    EXPECT_EQ(ten[2].host.n(), 10);
    EXPECT_EQ(ten[2].host.edge_count(), 1u + 2u * 8u);  // |A| = 8
    EXPECT_EQ(decide(ten[2]), OracleStatus::NotFound);    // P7 needs 4 vertices of A
    EXPECT_EQ(embeds(make_path(5), ten[2].host).status, OracleStatus::Found);

    for (int n = 6; n <= 14; ++n)
        for (int k = 2; k <= std::min(n, 7); ++k)
            for (const auto& inst : gen_erdos_sos_extremal(n, k))
                EXPECT_EQ(decide(inst), OracleStatus::NotFound) << n << " " << k << " " << inst.params.dump();
}

TEST(RandomHost, DegreeBoundsAndDeterminism) {
    const int k = 150;
    const int min_deg = (11 * k + 19) / 20, max_deg = (22 * k + 9) / 10;
    Graph G = random_host_with_degrees(600, min_deg, max_deg, 1);
    auto st = degree_stats(G);
    EXPECT_GE(st.min, min_deg);
    EXPECT_GE(st.max, max_deg);
    EXPECT_EQ(G.degree(0), max_deg);
    Graph H = random_host_with_degrees(600, min_deg, max_deg, 1);
    EXPECT_EQ(G.edges(), H.edges());
    EXPECT_NE(G.edges(), random_host_with_degrees(600, min_deg, max_deg, 2).edges());

    Graph U = random_host_with_degrees(20, 3, 19, 5);
    EXPECT_EQ(U.degree(0), 19);
    EXPECT_THROW(random_host_with_degrees(10, 10, 3, 1), ContractViolation);
}
