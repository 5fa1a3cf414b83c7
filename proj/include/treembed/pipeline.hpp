#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace treembed {

enum class DegreeMode { TwoKHalf, TwoThirds, BoundedDelta, ErdosSos, SecondNbhd };

inline DegreeMode parse_degree_mode(const std::string& s) {
    if (s == "two-k-half") return DegreeMode::TwoKHalf;
    if (s == "two-thirds") return DegreeMode::TwoThirds;
    if (s == "bounded-delta") return DegreeMode::BoundedDelta;
    if (s == "erdos-sos") return DegreeMode::ErdosSos;
    if (s == "second-nbhd") return DegreeMode::SecondNbhd;
    throw ContractViolation("unknown embedding mode '" + s + "'");
}

inline const char* to_string(DegreeMode m) {
    switch (m) {
        case DegreeMode::TwoKHalf: return "two-k-half";
        case DegreeMode::TwoThirds: return "two-thirds";
        case DegreeMode::BoundedDelta: return "bounded-delta";
        case DegreeMode::ErdosSos: return "erdos-sos";
        default: return "second-nbhd";
    }
}

struct PipelineOptions {
    DegreeMode mode = DegreeMode::TwoKHalf;
    int max_tree_degree = 0;  // bounded-delta: the constant Delta
    std::optional<std::vector<VertexSet>> clusters;  // accepted partition of G - x
};

namespace detail {

inline std::vector<int> second_neighbourhood_sizes(const Graph& G, int x) {
    auto d = bfs_distances(G, x);
    int n1 = 0, n2 = 0;
    for (int v = 0; v < G.n(); ++v) n1 += d[v] == 1, n2 += d[v] == 2;
    return {n1, n2};
}

inline int default_cluster_size(int n) { return std::max(8, (n - 1) / 12); }

inline EmbedderConfig pipeline_config(const EmbedderConfig& in, const Rational& alpha, int m, std::int64_t k) {
    EmbedderConfig cfg = in;
    auto derived = EmbedderConfig::derive(alpha, in.eps, in.k);
    cfg.alpha = alpha;
    cfg.c = derived.c;
    cfg.d1 = derived.d1;
    cfg.d2 = derived.d2;
    cfg.exact_walks = false;
    if (!cfg.beta && k > 0) cfg.beta = Rational(std::max<std::int64_t>(1, m / 4), k);
    if (*cfg.beta >= 1) cfg.beta = Rational(1, 2);
    return cfg;
}

// Repeatedly drop vertices of degree at most d/2; the average degree never falls.
inline VertexSet dense_core(const Graph& G) {
    const int n = G.n();
    if (n == 0) return {};
    Rational d(2 * static_cast<std::int64_t>(G.edge_count()), n);
    std::vector<int> deg(n);
    std::vector<char> alive(n, 1);
    for (int v = 0; v < n; ++v) deg[v] = G.degree(v);
    std::vector<int> st;
    for (int v = 0; v < n; ++v)
        if (2 * Rational(deg[v]) <= d) st.push_back(v), alive[v] = 0;
    while (!st.empty()) {
        int v = st.back();
        st.pop_back();
        for (int w : G.neighbors(v))
            if (alive[w] && 2 * Rational(--deg[w]) <= d) alive[w] = 0, st.push_back(w);
    }
    VertexSet out;
    for (int v = 0; v < n; ++v)
        if (alive[v]) out.push_back(v);
    return out;
}

inline Rational edge_density(const Graph& G, const VertexSet& s) {
    if (s.empty()) return Rational(0);
    auto in = membership(G.n(), s);
    std::int64_t e = 0;
    for (int v : s) e += count_neighbors_in(G, v, in);
    return Rational(e, 2 * static_cast<std::int64_t>(s.size()));
}

inline EmbedResult failure_result(const std::string& stage, const std::string& scenario, const std::string& reason,
                                  Trace tr) {
    EmbedResult res;
    res.scenario = scenario;
    res.trace = std::move(tr);
    EmbedFailure f;
    f.stage = stage;
    f.scenario = scenario;
    f.reason = reason;
    res.failure = f;
    return res;
}

inline void prepend_trace(EmbedResult& res, const Trace& pre) {
    res.trace.warnings.insert(res.trace.warnings.begin(), pre.warnings.begin(), pre.warnings.end());
    res.trace.events.insert(res.trace.events.begin(), pre.events.begin(), pre.events.end());
}

inline EmbedResult erdos_sos_pipeline(const Graph& G, const RootedTree& T, const PipelineOptions& opt,
                                      EmbedderConfig cfg, Trace tr) {
    const int n = G.n();
    VertexSet core = dense_core(G);
    if (core.empty()) return failure_result("scenario", "ES", "dense core is empty", std::move(tr));
    Graph H = induced_subgraph(G, core);
    VertexSet heaviest;
    Rational best(-1);
    for (const auto& comp : components(H)) {
        VertexSet s;
        for (int v : comp) s.push_back(core[v]);
        Rational d = edge_density(G, s);
        if (d > best) best = d, heaviest = std::move(s);
    }
    tr.event("dense core " + std::to_string(core.size()) + " vertices; heaviest component " +
             std::to_string(heaviest.size()));
    const int m = cfg.cluster_size.value_or(default_cluster_size(static_cast<int>(heaviest.size())));
    cfg = pipeline_config(cfg, Rational(1, 2), m, detail::tree_k(cfg, T));
    std::vector<VertexSet> clusters;
    if (opt.clusters) {
        clusters = *opt.clusters;
    } else {
        std::vector<char> skip(n, 1);
        for (int v : heaviest) skip[v] = 0;
        clusters = heuristic_partition(G, m, cfg.seed, &skip);
    }
    if (clusters.empty()) return failure_result("scenario", "ES", "no clusters of size " + std::to_string(m), std::move(tr));
    auto RG = build_reduced_graph(G, clusters, cfg.eps, cfg.eta);
    std::vector<int> pick;
    Rational pick_density(-1);
    for (const auto& comp : components(RG.R)) {
        VertexSet s;
        for (int c : comp) s.insert(s.end(), RG.partition.clusters[c].begin(), RG.partition.clusters[c].end());
        std::sort(s.begin(), s.end());
        Rational d = edge_density(G, s);
        if (d > pick_density || (d == pick_density && comp.size() > pick.size())) pick_density = d, pick = comp;
    }
    tr.event("densest R-component: " + std::to_string(pick.size()) + " clusters");
    auto res = embed_connected(G, RG, pick, whole_tree(T), cfg, detail::cluster_scale(RG));
    res.scenario = "ES";
    if (res.failure) res.failure->scenario = "ES";
    prepend_trace(res, tr);
    return res;
}

// Delta(T) = 2: the cut vertex goes to x and the two halves greedily into
// the two components x sees.
inline EmbedResult path_halves(const Graph& G, int x, const ReducedGraph& RG, const RootedTree& T,
                               const EmbedderConfig& cfg, const Scenario& sc) {
    KeyEmbedder E(G, x, RG, T, cfg, sc);
    int z = half_separator(T, smallest_leaf(T));
    RootedTree TZ = T.root() == z ? T : T.rerooted(z);
    E.place_cut_vertex(z);
    E.trace.event("path: half separator " + std::to_string(z) + " on x, halves greedily into components " +
                  std::to_string(sc.c1) + " and " + std::to_string(sc.c2));
    const auto& kids = TZ.children(z);
    if (E.greedy(TZ, {kids[0]}, sc.c1, nullptr, "half 1") && kids.size() > 1)
        E.greedy(TZ, {kids[1]}, sc.c2, nullptr, "half 2");
    return E.finish();
}

}  // namespace detail

// Whole-graph pipelines. Degree hypotheses of the mode are hard; the
// pattern's degree exponent bound is soft.
inline EmbedResult embed_with_degree_conditions(const Graph& G, const RootedTree& T, const PipelineOptions& opt,
                                                const EmbedderConfig& in) {
    const int n = G.n();
    const std::int64_t k = detail::tree_k(in, T);
    const Rational dl = in.delta;
    Trace tr;
    if (n == 0) throw PreconditionError("n >= 1");
    const auto ds = degree_stats(G);
    const Rational mindeg(ds.min), maxdeg(ds.max);
    require_hard(n >= k && Rational(k) >= dl * n, "n >= k >= delta n");
    auto half_min = [&] { require_hard(mindeg >= (1 + dl) * Rational(k, 2), "delta(G) >= (1+delta) k/2"); };

    Rational alpha(1, 2);
    int x = -1;
    switch (opt.mode) {
        case DegreeMode::TwoKHalf:
            half_min();
            require_hard(maxdeg >= 2 * (1 + dl) * k, "Delta(G) >= 2(1+delta) k");
            break;
        case DegreeMode::TwoThirds:
            alpha = Rational(2, 3);
            require_hard(mindeg >= (1 + dl) * Rational(2 * k, 3), "delta(G) >= (1+delta) 2k/3");
            require_hard(maxdeg >= (1 + dl) * k, "Delta(G) >= (1+delta) k");
            break;
        case DegreeMode::BoundedDelta: {
            const int D = opt.max_tree_degree;
            if (D < 2) throw ContractViolation("bounded-delta needs Delta >= 2");
            half_min();
            require_hard(maxdeg >= 2 * (Rational(D - 1, D) + dl) * k, "Delta(G) >= 2((Delta-1)/Delta + delta) k");
            require_hard(T.max_degree() <= D, "Delta(T) <= Delta");
            break;
        }
        case DegreeMode::ErdosSos:
            require_hard(ds.average > (1 + dl) * k, "d(G) > (1+delta) k");
            break;
        case DegreeMode::SecondNbhd: {
            half_min();
            int best = -1;
            for (int v = 0; v < n; ++v) {
                auto s = detail::second_neighbourhood_sizes(G, v);
                int mn = std::min(s[0], s[1]);
                if (Rational(mn) >= (1 + dl) * Rational(4 * k, 3) && mn > best) best = mn, x = v;
            }
            require_hard(x >= 0, "min(|N(x)|, |N2(x)|) >= (1+delta) 4k/3 for some x");
            break;
        }
    }
    {
        const int c = alpha == Rational(2, 3) ? 49 : 67;
        if (opt.mode != DegreeMode::BoundedDelta)
            require_soft(degree_within_root(T.max_degree(), k, c), "Delta(T) <= k^(1/" + std::to_string(c) + ")", in,
                         tr);
    }
    if (opt.mode == DegreeMode::ErdosSos) return detail::erdos_sos_pipeline(G, T, opt, in, std::move(tr));

    if (x < 0) {
        x = 0;
        for (int v = 1; v < n; ++v)
            if (G.degree(v) > G.degree(x)) x = v;
    }
    const int m = in.cluster_size.value_or(detail::default_cluster_size(n));
    EmbedderConfig cfg = detail::pipeline_config(in, alpha, m, k);
    std::vector<VertexSet> clusters;
    if (opt.clusters) {
        clusters = *opt.clusters;
        for (const auto& c : clusters)
            if (std::binary_search(c.begin(), c.end(), x)) throw ContractViolation("accepted partition contains x");
    } else {
        std::vector<char> skip(n, 0);
        skip[x] = 1;
        clusters = heuristic_partition(G, m, cfg.seed, &skip);
    }
    tr.event("x = " + std::to_string(x) + " (degree " + std::to_string(G.degree(x)) + "), " +
             std::to_string(clusters.size()) + " clusters of size " + std::to_string(m));
    if (clusters.empty()) return detail::failure_result("scenario", "None", "no clusters", std::move(tr));
    auto RG = build_reduced_graph(G, clusters, cfg.eps, cfg.eta);
    auto [a, b] = tree_bipartition_sizes(T);
    auto sc = classify_scenario(G, x, RG, k, std::max(a, b), cfg);
    tr.event("scenario " + sc.tag + " over " + std::to_string(sc.comps.size()) + " R-components");
    if (sc.tag == "None")
        return detail::failure_result("scenario", "None", "no key-lemma scenario applies", std::move(tr));
    EmbedResult res;
    const bool path_case = opt.mode == DegreeMode::BoundedDelta && opt.max_tree_degree == 2 &&
                           sc.tag != "I" && sc.tag != "II" && sc.tag != "III" && sc.tag != "IVa";
    res = path_case ? detail::path_halves(G, x, RG, T, cfg, sc) : embed_key(G, x, RG, T, cfg, sc);
    detail::prepend_trace(res, tr);
    return res;
}

}  // namespace treembed
