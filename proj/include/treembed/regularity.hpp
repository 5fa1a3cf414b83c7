#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graph.hpp"
#include "rational.hpp"
#include "rng.hpp"

namespace treembed {

inline std::int64_t edges_between(const Graph& G, const VertexSet& A, const VertexSet& B) {
    auto inB = membership(G.n(), B);
    std::int64_t e = 0;
    for (int a : A) e += count_neighbors_in(G, a, inB);
    return e;
}

inline Rational pair_density(const Graph& G, const VertexSet& A, const VertexSet& B) {
    if (A.empty() || B.empty()) throw ContractViolation("pair_density: empty side");
    auto inA = membership(G.n(), A);
    for (int b : B)
        if (inA[b]) throw ContractViolation("pair_density: sides overlap at vertex " + std::to_string(b));
    return Rational(edges_between(G, A, B), static_cast<std::int64_t>(A.size()) * static_cast<std::int64_t>(B.size()));
}

enum class RegularityMode { Exhaustive, Sampled };

struct RegularityVerdict {
    enum Kind { Regular, Irregular, Undecided } kind = Undecided;
    VertexSet X, Y;  // witness when Irregular
};

namespace detail {

inline bool significant(std::size_t part, std::size_t whole, const Rational& eps) {
    return Rational(static_cast<std::int64_t>(part)) > eps * Rational(static_cast<std::int64_t>(whole));
}

inline bool violates(std::int64_t e, std::size_t x, std::size_t y, const Rational& d, const Rational& eps) {
    Rational diff = Rational(e, static_cast<std::int64_t>(x * y)) - d;
    if (diff < 0) diff = -diff;
    return diff >= eps;
}

}  // namespace detail

// Exhaustive mode enumerates every X of A; for a fixed X and |Y| = s the
// extreme values of e(X,Y) come from the s lowest / highest deg(b, X), so
// checking those two Y per size is equivalent to checking all Y.
inline RegularityVerdict check_regular_pair(const Graph& G, const VertexSet& A, const VertexSet& B, const Rational& eps,
                                            RegularityMode mode, std::size_t samples = 10000, std::uint64_t seed = 1) {
    const std::size_t m = A.size();
    if (m == 0 || B.size() != m) throw ContractViolation("check_regular_pair: sides must have equal positive size");
    if (mode == RegularityMode::Exhaustive && m > 14)
        throw ContractViolation("check_regular_pair: exhaustive mode needs m <= 14");
    const Rational d = pair_density(G, A, B);
    RegularityVerdict out;
    if (mode == RegularityMode::Exhaustive) {
        std::vector<std::uint32_t> nbrmask(m, 0);  // per b: bitmask of neighbours in A
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < m; ++i)
                if (G.adjacent(A[i], B[j])) nbrmask[j] |= 1u << i;
        std::vector<std::pair<int, int>> deg(m);
        for (std::uint32_t X = 1; X < (1u << m); ++X) {
            std::size_t x = static_cast<std::size_t>(std::popcount(X));
            if (!detail::significant(x, m, eps)) continue;
            for (std::size_t j = 0; j < m; ++j) deg[j] = {std::popcount(nbrmask[j] & X), static_cast<int>(j)};
            std::sort(deg.begin(), deg.end());
            std::int64_t lo = 0, hi = 0;
            for (std::size_t s = 1; s <= m; ++s) {
                lo += deg[s - 1].first;
                hi += deg[m - s].first;
                if (!detail::significant(s, m, eps)) continue;
                bool low = detail::violates(lo, x, s, d, eps) && Rational(lo, static_cast<std::int64_t>(x * s)) < d;
                bool high = detail::violates(hi, x, s, d, eps) && Rational(hi, static_cast<std::int64_t>(x * s)) > d;
                if (!low && !high) continue;
                out.kind = RegularityVerdict::Irregular;
                for (std::size_t i = 0; i < m; ++i)
                    if (X >> i & 1) out.X.push_back(A[i]);
                for (std::size_t r = 0; r < s; ++r) out.Y.push_back(B[deg[low ? r : m - 1 - r].second]);
                std::sort(out.X.begin(), out.X.end());
                std::sort(out.Y.begin(), out.Y.end());
                return out;
            }
        }
        out.kind = RegularityVerdict::Regular;
        return out;
    }
    Rng rng(seed);
    std::size_t min_size = static_cast<std::size_t>(floor_of(eps * Rational(static_cast<std::int64_t>(m)))) + 1;
    if (min_size > m) {
        out.kind = RegularityVerdict::Regular;  // no significant subsets at all
        return out;
    }
    auto inB = [&] {
        std::vector<int> pos(G.n(), -1);
        for (std::size_t j = 0; j < m; ++j) pos[B[j]] = static_cast<int>(j);
        return pos;
    }();
    for (std::size_t it = 0; it < samples; ++it) {
        auto draw = [&](const VertexSet& S) {
            VertexSet v = S;
            rng.shuffle(v);
            v.resize(min_size + rng.below(m - min_size + 1));
            std::sort(v.begin(), v.end());
            return v;
        };
        VertexSet X = draw(A), Y = draw(B);
        std::vector<char> inY(m, 0);
        for (int y : Y) inY[inB[y]] = 1;
        std::int64_t e = 0;
        for (int a : X)
            for (int w : G.neighbors(a))
                if (inB[w] >= 0 && inY[inB[w]]) ++e;
        if (detail::violates(e, X.size(), Y.size(), d, eps)) {
            out.kind = RegularityVerdict::Irregular;
            out.X = std::move(X);
            out.Y = std::move(Y);
            return out;
        }
    }
    return out;
}

// a in A with deg(a, Y) > (d(A,B) - eps)|Y|.
inline VertexSet typical_vertices(const Graph& G, const VertexSet& A, const VertexSet& B, const VertexSet& Y,
                                  const Rational& eps) {
    if (!detail::significant(Y.size(), B.size(), eps)) throw ContractViolation("typical_vertices: |Y| <= eps|B|");
    Rational d = pair_density(G, A, B);
    auto inY = membership(G.n(), Y);
    Rational threshold = (d - eps) * Rational(static_cast<std::int64_t>(Y.size()));
    VertexSet out;
    for (int a : A)
        if (Rational(count_neighbors_in(G, a, inY)) > threshold) out.push_back(a);
    return out;
}

// Clusters (disjoint vertex sets) with their exact pairwise densities.
struct RegularPartition {
    std::vector<VertexSet> clusters;
    Rational eps, eta;
    std::vector<std::vector<Rational>> density;

    int size() const { return static_cast<int>(clusters.size()); }
    std::vector<int> cluster_of(int n) const {
        std::vector<int> c(n, -1);
        for (int i = 0; i < size(); ++i)
            for (int v : clusters[i]) c[v] = i;
        return c;
    }
};

inline std::vector<std::vector<Rational>> density_matrix(const Graph& G, const std::vector<VertexSet>& clusters) {
    const std::size_t l = clusters.size();
    std::vector<int> owner(G.n(), -1);
    for (std::size_t i = 0; i < l; ++i)
        for (int v : clusters[i]) {
            if (owner[v] != -1) throw ContractViolation("clusters overlap at vertex " + std::to_string(v));
            owner[v] = static_cast<int>(i);
        }
    std::vector<std::vector<std::int64_t>> e(l, std::vector<std::int64_t>(l, 0));
    for (std::size_t i = 0; i < l; ++i)
        for (int v : clusters[i])
            for (int w : G.neighbors(v))
                if (owner[w] > static_cast<int>(i)) e[i][owner[w]]++;
    std::vector<std::vector<Rational>> d(l, std::vector<Rational>(l, Rational(0)));
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i + 1; j < l; ++j) {
            std::int64_t denom = static_cast<std::int64_t>(clusters[i].size() * clusters[j].size());
            d[i][j] = d[j][i] = denom ? Rational(e[i][j], denom) : Rational(0);
        }
    return d;
}

struct MinDegreeTransfer {
    Rational alpha;
    int min_degree = 0;   // delta(R)
    Rational bound;       // (alpha - 2 eta) |R|
    bool hypothesis = false;  // delta(G) >= alpha n for the graph the clusters came from
    bool holds = false;
};

struct ReducedGraph {
    RegularPartition partition;
    Graph R;  // vertex i is cluster i; edge iff density > eta
    std::optional<MinDegreeTransfer> transfer;
};

inline ReducedGraph build_reduced_graph(const Graph& G, const std::vector<VertexSet>& clusters, const Rational& eps,
                                        const Rational& eta, std::optional<Rational> alpha = std::nullopt) {
    for (const auto& c : clusters)
        if (c.size() != clusters.front().size())
            throw ContractViolation("build_reduced_graph: clusters have unequal sizes");
    ReducedGraph out;
    out.partition.clusters = clusters;
    for (auto& c : out.partition.clusters) std::sort(c.begin(), c.end());
    out.partition.eps = eps;
    out.partition.eta = eta;
    out.partition.density = density_matrix(G, out.partition.clusters);
    const int l = static_cast<int>(clusters.size());
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j)
            if (out.partition.density[i][j] > eta) e.emplace_back(i, j);
    out.R = Graph(l, e);
    if (alpha && l > 0 && G.n() > 0) {
        MinDegreeTransfer f;
        f.alpha = *alpha;
        f.min_degree = degree_stats(out.R).min;
        f.bound = (*alpha - 2 * eta) * Rational(l);
        f.hypothesis = Rational(degree_stats(G).min) >= *alpha * Rational(G.n());
        f.holds = Rational(f.min_degree) >= f.bound;
        out.transfer = f;
    }
    return out;
}

// Equal-size clusters of size m drawn component by component: bipartite
// components are chunked side by side so clusters stay independent, other
// components are shuffled and chunked. Leftovers (< m per chunk run) stay
// unclustered.
inline std::vector<VertexSet> heuristic_partition(const Graph& G, int m, std::uint64_t seed,
                                                  const std::vector<char>* skip = nullptr) {
    if (m < 1) throw ContractViolation("heuristic_partition: cluster size must be positive");
    Rng rng(seed);
    std::vector<VertexSet> out;
    auto chunk = [&](VertexSet v) {
        rng.shuffle(v);
        for (std::size_t i = 0; i + m <= v.size(); i += m) {
            VertexSet c(v.begin() + i, v.begin() + i + m);
            std::sort(c.begin(), c.end());
            out.push_back(std::move(c));
        }
    };
    VertexSet keep;
    for (int v = 0; v < G.n(); ++v)
        if (!skip || !(*skip)[v]) keep.push_back(v);
    Graph H = induced_subgraph(G, keep);
    for (const auto& comp : components(H)) {
        auto back = [&](const VertexSet& s) {
            VertexSet r;
            for (int v : s) r.push_back(keep[v]);
            return r;
        };
        if (auto b = bipartition(H, comp)) {
            chunk(back(b->classA));
            chunk(back(b->classB));
        } else {
            chunk(back(comp));
        }
    }
    return out;
}

inline nlohmann::json to_json(const RegularPartition& P) {
    nlohmann::json j;
    j["clusters"] = P.clusters;
    j["eps"] = to_string(P.eps);
    j["eta"] = to_string(P.eta);
    nlohmann::json d = nlohmann::json::array();
    for (const auto& row : P.density) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& x : row) r.push_back(to_string(x));
        d.push_back(r);
    }
    j["density"] = d;
    return j;
}

inline RegularPartition partition_from_json(const nlohmann::json& j) {
    RegularPartition P;
    P.clusters = j.at("clusters").get<std::vector<VertexSet>>();
    P.eps = parse_rational(j.at("eps").get<std::string>());
    P.eta = parse_rational(j.at("eta").get<std::string>());
    if (j.contains("density"))
        for (const auto& row : j.at("density")) {
            std::vector<Rational> r;
            for (const auto& x : row) r.push_back(parse_rational(x.get<std::string>()));
            P.density.push_back(r);
        }
    return P;
}

}  // namespace treembed
