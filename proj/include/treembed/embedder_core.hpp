#pragma once

#include <climits>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "graph.hpp"
#include "oracle.hpp"
#include "rational.hpp"
#include "regularity.hpp"
#include "tree.hpp"

namespace treembed {

// Exact root when numerator and denominator are perfect squares, otherwise
// the largest multiple of 1e-9 not exceeding the true root.
inline Rational rational_sqrt(const Rational& q) {
    if (q < 0) throw ContractViolation("rational_sqrt: negative argument");
    auto isqrt = [](std::int64_t v) {
        auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
        while (r * r > v) --r;
        while ((r + 1) * (r + 1) <= v) ++r;
        return r;
    };
    std::int64_t a = isqrt(q.numerator()), b = isqrt(q.denominator());
    if (a * a == q.numerator() && b * b == q.denominator()) return Rational(a, b);
    const std::int64_t scale = 1'000'000'000;
    auto approx = static_cast<std::int64_t>(std::floor(std::sqrt(to_real(q)) * scale));
    while (approx > 0 && Rational(approx, scale) * Rational(approx, scale) > q) --approx;
    return Rational(approx, scale);
}

enum class HypothesisPolicy { Refuse, Warn };

struct EmbedderConfig {
    Rational eps{1, 10000};
    Rational eta{1, 20};  // 5 sqrt(eps)
    Rational alpha{1, 2};
    Rational delta{1, 10};
    int d = 0;   // diameter cap for the component embedders; 0 = use the component's diameter
    int c = 67;  // Delta(T) <= k^(1/c)
    int d1 = 10, d2 = 22;
    int k = 0;   // 0 = take |T| - 1
    std::optional<Rational> beta;     // piece size fraction; default eps / |R|
    std::optional<int> cluster_size;  // for partitions built by the pipelines
    HypothesisPolicy policy = HypothesisPolicy::Refuse;
    bool exact_walks = true;  // nonbipartite routing uses walks of length exactly 3d+1
    std::uint64_t seed = 1;

    Rational sqrt_eps() const { return rational_sqrt(eps); }
    Rational theta() const { return rational_sqrt(rational_sqrt(eps)); }

    // c = 18 ceil(2/alpha) - 5, d1 = 3 ceil(2/alpha) - 2, d2 = 2(d1 + 1), so c = 3 d2 + 1.
    static EmbedderConfig derive(const Rational& alpha, const Rational& eps, int k = 0) {
        if (alpha <= 0 || alpha >= 1) throw ContractViolation("alpha must lie in (0,1)");
        if (eps <= 0 || eps >= 1) throw ContractViolation("eps must lie in (0,1)");
        EmbedderConfig cfg;
        cfg.alpha = alpha;
        cfg.eps = eps;
        cfg.eta = 5 * rational_sqrt(eps);
        std::int64_t q = ceil_of(Rational(2) / alpha);
        cfg.c = static_cast<int>(18 * q - 5);
        cfg.d1 = static_cast<int>(3 * q - 2);
        cfg.d2 = 2 * (cfg.d1 + 1);
        cfg.k = k;
        return cfg;
    }
};

inline nlohmann::json to_json(const EmbedderConfig& c) {
    nlohmann::json j{{"eps", to_string(c.eps)},   {"eta", to_string(c.eta)}, {"alpha", to_string(c.alpha)},
                     {"delta", to_string(c.delta)}, {"d", c.d},               {"c", c.c},
                     {"d1", c.d1},                 {"d2", c.d2},             {"k", c.k},
                     {"exact_walks", c.exact_walks}, {"seed", c.seed},
                     {"policy", c.policy == HypothesisPolicy::Refuse ? "refuse" : "warn"}};
    if (c.beta) j["beta"] = to_string(*c.beta);
    if (c.cluster_size) j["cluster_size"] = *c.cluster_size;
    return j;
}

// Instrumentation collected during one run.
struct Trace {
    std::vector<std::string> warnings;  // soft hypotheses that failed under the Warn policy
    std::vector<std::string> events;
    std::vector<nlohmann::json> balance;  // nonbipartite (E) log, one entry per piece
    int min_candidates = INT_MAX;         // fewest candidate images seen at any step
    int seeds_outside_S = 0;
    int prefix_outside_L = 0;
    int atypical = 0;  // placements with no typical candidate available

    void event(std::string s) { events.push_back(std::move(s)); }
};

inline nlohmann::json to_json(const Trace& t) {
    return {{"warnings", t.warnings},
            {"events", t.events},
            {"balance", t.balance},
            {"min_candidates", t.min_candidates == INT_MAX ? -1 : t.min_candidates},
            {"seeds_outside_S", t.seeds_outside_S},
            {"prefix_outside_L", t.prefix_outside_L},
            {"atypical", t.atypical}};
}

struct EmbedFailure {
    std::string stage;  // pair | seed | piece | greedy | scenario | connected
    std::string scenario;
    std::string reason;
    int starved_cluster = -1;
    std::string starved_slice;
    int starved_level = -1;
    int stopped_seed = -1;  // pattern vertex where a slice run stopped
    nlohmann::json fill = nlohmann::json::array();  // per cluster free fractions
};

inline nlohmann::json to_json(const EmbedFailure& f) {
    return {{"stage", f.stage},
            {"scenario", f.scenario},
            {"reason", f.reason},
            {"starved_cluster", f.starved_cluster},
            {"starved_slice", f.starved_slice},
            {"starved_level", f.starved_level},
            {"stopped_seed", f.stopped_seed},
            {"fill", f.fill}};
}

struct EmbedResult {
    std::optional<Embedding> embedding;
    std::optional<EmbedFailure> failure;
    std::string scenario;
    Trace trace;

    bool ok() const { return embedding.has_value(); }
};

inline nlohmann::json to_json(const EmbedResult& r) {
    nlohmann::json j{{"ok", r.ok()}, {"scenario", r.scenario}, {"trace", to_json(r.trace)}};
    if (r.embedding) j["embedding"] = to_json(*r.embedding);
    if (r.failure) j["failure"] = to_json(*r.failure);
    return j;
}

// Headline degree conditions and capacity checks always refuse.
inline void require_hard(bool ok, const std::string& inequality) {
    if (!ok) throw PreconditionError(inequality);
}

// Conditions whose constants only make sense asymptotically.
inline void require_soft(bool ok, const std::string& inequality, const EmbedderConfig& cfg, Trace& trace) {
    if (ok) return;
    if (cfg.policy == HypothesisPolicy::Refuse) throw PreconditionError(inequality);
    trace.warnings.push_back(inequality);
}

// k^(1/e) compared without floating error at integer boundaries: D <= k^(1/e) iff D^e <= k.
inline bool degree_within_root(int D, std::int64_t k, int e) {
    if (D <= 1) return true;
    long double p = 1;
    for (int i = 0; i < e; ++i) {
        p *= D;
        if (p > static_cast<long double>(k)) return false;
    }
    return true;
}

namespace detail {

inline int free_neighbours_in(const Graph& G, int h, const std::vector<char>& in, const std::vector<char>& used) {
    int c = 0;
    for (int w : G.neighbors(h)) c += in[w] && !used[w];
    return c;
}

}  // namespace detail

struct PairEmbedOptions {
    bool root_in_X = true;
    std::uint64_t seed = 1;
};

// Levelwise greedy embedding into (X u Y) \ Z of a pair (A, B) treated as
// (eps, 5 sqrt(eps))-regular. Each level goes to free vertices typical to
// the free part of the opposite side; every step must offer >= 2 eps m
// candidates, otherwise the run fails naming the starved level.
inline EmbedResult embed_into_pair(const Graph& G, const VertexSet& A, const VertexSet& B, const VertexSet& X,
                                   const VertexSet& Y, const VertexSet& Z, const RootedTree& T, const Rational& eps,
                                   const EmbedderConfig& cfg = {}, PairEmbedOptions opt = {}) {
    EmbedResult res;
    Trace& tr = res.trace;
    if (A.size() != B.size() || A.empty()) throw ContractViolation("embed_into_pair: |A| = |B| > 0 required");
    const std::int64_t m = static_cast<std::int64_t>(A.size());
    auto inA = membership(G.n(), A), inB = membership(G.n(), B);
    for (int v : A)
        if (inB[v]) throw ContractViolation("embed_into_pair: A and B overlap");
    for (int v : X)
        if (!inA[v]) throw ContractViolation("embed_into_pair: X must lie in A");
    for (int v : Y)
        if (!inB[v]) throw ContractViolation("embed_into_pair: Y must lie in B");
    auto inZ = membership(G.n(), Z);
    std::vector<char> side[2] = {std::vector<char>(G.n(), 0), std::vector<char>(G.n(), 0)};
    std::int64_t avail[2] = {0, 0};
    for (int v : X)
        if (!inZ[v]) side[0][v] = 1, ++avail[0];
    for (int v : Y)
        if (!inZ[v]) side[1][v] = 1, ++avail[1];
    const Rational se = rational_sqrt(eps);
    const Rational dens = pair_density(G, A, B);
    Rational beta = cfg.beta.value_or(eps);
    require_soft(beta <= eps && eps <= Rational(1, 25), "0 < beta <= eps <= 1/25", cfg, tr);
    require_soft(Rational(T.n()) <= beta * m, "|T| <= beta m", cfg, tr);
    require_soft(dens > 5 * se, "d(A,B) > 5 sqrt(eps)", cfg, tr);
    require_hard(Rational(std::min(avail[0], avail[1])) > se * m, "min{|X\\Z|, |Y\\Z|} > sqrt(eps) m");

    const double d_real = static_cast<double>(to_real(dens)), e_real = static_cast<double>(to_real(eps));
    const std::int64_t need = ceil_of(2 * eps * m);
    std::vector<char> used(G.n(), 0);
    std::int64_t free_side[2] = {avail[0], avail[1]};
    std::vector<int> phi(T.n(), -1);

    auto typical = [&](int h, int opp) {
        if (free_side[opp] == 0) return true;
        int deg = detail::free_neighbours_in(G, h, side[opp], used);
        return deg > (d_real - e_real) * static_cast<double>(free_side[opp]);
    };
    auto fail = [&](int level, const std::string& why) {
        EmbedFailure f;
        f.stage = "pair";
        f.starved_level = level;
        f.reason = why;
        res.failure = f;
        return res;
    };

    const int root_side = opt.root_in_X ? 0 : 1;
    for (int level = 0; level <= T.height(); ++level) {
        const int s = (root_side + level) % 2;
        for (int v : T.levels()[level]) {
            std::vector<int> cand;
            if (level == 0) {
                for (int h = 0; h < G.n(); ++h)
                    if (side[s][h] && !used[h] && typical(h, 1 - s)) cand.push_back(h);
            } else {
                for (int h : G.neighbors(phi[T.parent(v)]))
                    if (side[s][h] && !used[h] && typical(h, 1 - s)) cand.push_back(h);
            }
            tr.min_candidates = std::min(tr.min_candidates, static_cast<int>(cand.size()));
            if (static_cast<std::int64_t>(cand.size()) < need)
                return fail(level, "only " + std::to_string(cand.size()) + " typical candidates, need " +
                                       std::to_string(need));
            // most free neighbours on the opposite side, then smallest id
            int best = -1, best_score = -1;
            for (int h : cand) {
                int sc = detail::free_neighbours_in(G, h, side[1 - s], used);
                if (sc > best_score) best = h, best_score = sc;
            }
            phi[v] = best;
            used[best] = 1;
            --free_side[s];
        }
    }
    if (!verify_embedding(T, G, phi)) throw InvariantViolation("embed_into_pair produced an invalid map");
    res.embedding = Embedding{phi};
    return res;
}

// Greedy embedding of the subtrees hanging from `roots` (children of an
// already embedded vertex or forest roots) into `territory`. Roots go to
// `root_target`; every vertex takes the free candidate with the most free
// territory neighbours that still leaves room for its children.
inline bool greedy_forest(const Graph& G, const RootedTree& T, const std::vector<int>& roots,
                          const std::vector<char>& territory, const std::vector<char>& root_target,
                          std::vector<char>& used, std::vector<int>& phi, std::string& why) {
    std::vector<int> stamp;
    for (int r : roots) {
        std::vector<int> queue{r};
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int v = queue[qi];
            const int need = static_cast<int>(T.children(v).size());
            int best = -1, best_score = -1;
            auto consider = [&](int h) {
                if (used[h] || !territory[h]) return;
                int sc = detail::free_neighbours_in(G, h, territory, used);
                if (sc >= need && sc > best_score) best = h, best_score = sc;
            };
            if (v == r) {
                for (int h = 0; h < G.n(); ++h)
                    if (root_target[h]) consider(h);
            } else {
                for (int h : G.neighbors(phi[T.parent(v)])) consider(h);
            }
            if (best < 0) {
                why = "greedy: no free image for pattern vertex " + std::to_string(v);
                return false;
            }
            phi[v] = best;
            used[best] = 1;
            for (int c : T.children(v)) queue.push_back(c);
        }
    }
    return true;
}

}  // namespace treembed
