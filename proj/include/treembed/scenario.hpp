#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cut_coloring.hpp"
#include "slice_engine.hpp"

namespace treembed {

// One component of the reduced graph as seen from the apex x. Sizes count
// clusters; `vertices*` and `nx*` count host vertices.
struct ComponentView {
    std::vector<int> clusters;
    bool bipartite = false;
    std::vector<int> side_a, side_b;  // side_a has at least as many clusters
    std::int64_t vertices = 0, vertices_a = 0, vertices_b = 0;
    std::int64_t nx = 0, nx_a = 0, nx_b = 0;

    std::int64_t size() const { return static_cast<std::int64_t>(clusters.size()); }
};

struct Scenario {
    std::string tag = "None";  // I, II, III, IVa..IVe or None
    int c1 = -1, c2 = -1, c3 = -1;  // indices into comps
    std::vector<ComponentView> comps;
    Rational scale{0};  // |R| / |union of clusters|
    std::vector<int> seen;  // components x sqrt(eps)-sees
};

inline nlohmann::json to_json(const Scenario& s) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : s.comps)
        comps.push_back({{"clusters", c.clusters},
                         {"bipartite", c.bipartite},
                         {"side_a", c.side_a},
                         {"side_b", c.side_b},
                         {"vertices", c.vertices},
                         {"nx", c.nx},
                         {"nx_a", c.nx_a},
                         {"nx_b", c.nx_b}});
    return {{"tag", s.tag}, {"c1", s.c1},   {"c2", s.c2},     {"c3", s.c3},
            {"seen", s.seen}, {"scale", to_string(s.scale)}, {"components", comps}};
}

namespace detail {

inline std::vector<ComponentView> component_views(const Graph& G, int x, const ReducedGraph& RG) {
    std::vector<char> nbr(G.n(), 0);
    for (int w : G.neighbors(x)) nbr[w] = 1;
    const auto& cl = RG.partition.clusters;
    auto count = [&](int c, std::int64_t& verts, std::int64_t& nx) {
        verts += static_cast<std::int64_t>(cl[c].size());
        for (int h : cl[c]) nx += nbr[h];
    };
    std::vector<ComponentView> out;
    for (const auto& comp : components(RG.R)) {
        ComponentView v;
        v.clusters = comp;
        if (auto b = bipartition(RG.R, comp)) {
            v.bipartite = true;
            v.side_a = b->classA;
            v.side_b = b->classB;
            if (v.side_b.size() > v.side_a.size()) std::swap(v.side_a, v.side_b);
            for (int c : v.side_a) count(c, v.vertices_a, v.nx_a);
            for (int c : v.side_b) count(c, v.vertices_b, v.nx_b);
            v.vertices = v.vertices_a + v.vertices_b;
            v.nx = v.nx_a + v.nx_b;
        } else {
            for (int c : comp) count(c, v.vertices, v.nx);
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline Rational cluster_scale(const ReducedGraph& RG) {
    std::int64_t total = 0;
    for (const auto& c : RG.partition.clusters) total += static_cast<std::int64_t>(c.size());
    return total == 0 ? Rational(0) : Rational(RG.partition.size(), total);
}

}  // namespace detail

// First matching tag in the order I, II, III, IVa..IVe. k1 is the larger
// colour class of the pattern tree.
inline Scenario classify_scenario(const Graph& G, int x, const ReducedGraph& RG, std::int64_t k, std::int64_t k1,
                                  const EmbedderConfig& cfg) {
    Scenario s;
    s.comps = detail::component_views(G, x, RG);
    s.scale = detail::cluster_scale(RG);
    const Rational theta = cfg.theta(), se = cfg.sqrt_eps();
    auto large = [&](std::int64_t clusters, const Rational& base) {
        return Rational(clusters) >= (1 + theta) * base * s.scale;
    };
    auto sees = [&](std::int64_t nx, std::int64_t verts) { return verts > 0 && Rational(nx) >= se * verts; };
    const Rational two_thirds_k = Rational(2 * k, 3);
    const int nc = static_cast<int>(s.comps.size());
    for (int i = 0; i < nc; ++i)
        if (sees(s.comps[i].nx, s.comps[i].vertices)) s.seen.push_back(i);

    auto pick = [&](const char* tag, int a, int b = -1, int c = -1) {
        s.tag = tag;
        s.c1 = a, s.c2 = b, s.c3 = c;
        return s;
    };
    for (int i = 0; i < nc; ++i)
        if (!s.comps[i].bipartite && large(s.comps[i].size(), Rational(k))) return pick("I", i);
    for (int i = 0; i < nc; ++i) {
        const auto& c = s.comps[i];
        if (c.bipartite && large(static_cast<std::int64_t>(c.side_a.size()), Rational(k1))) return pick("II", i);
    }
    for (int i = 0; i < nc; ++i) {
        const auto& c = s.comps[i];
        if (c.bipartite && large(static_cast<std::int64_t>(c.side_a.size()), two_thirds_k) &&
            sees(c.nx_a, c.vertices_a) && sees(c.nx_b, c.vertices_b))
            return pick("III", i);
    }
    if (s.seen.size() < 2) return s;
    const auto& seen = s.seen;
    for (int i : seen)
        for (int j : seen)
            if (i < j)
                for (int c = 0; c < nc; ++c)
                    if (c != i && c != j && s.comps[c].nx > 0) return pick("IVa", i, j, c);
    auto other = [&](int i) {
        for (int j : seen)
            if (j != i) return j;
        return -1;
    };
    for (int i : seen)
        if (!s.comps[i].bipartite && large(s.comps[i].size(), two_thirds_k)) return pick("IVb", i, other(i));
    for (int i : seen)
        if (s.comps[i].bipartite && s.comps[i].nx_a > 0 && s.comps[i].nx_b > 0) return pick("IVc", i, other(i));
    // From here on a bipartite seen component is seen on one side only.
    auto seen_side = [&](const ComponentView& c) { return c.nx_a > 0 ? c.side_a : c.side_b; };
    auto unseen_side = [&](const ComponentView& c) { return c.nx_a > 0 ? c.side_b : c.side_a; };
    for (int i : seen) {
        const auto& c = s.comps[i];
        if (c.bipartite && large(static_cast<std::int64_t>(c.side_b.size()), two_thirds_k))
            return pick("IVd", i, other(i));
    }
    for (int i : seen)
        for (int j : seen) {
            if (i == j || !s.comps[i].bipartite || !s.comps[j].bipartite) continue;
            auto a1 = static_cast<std::int64_t>(seen_side(s.comps[i]).size());
            auto b2 = static_cast<std::int64_t>(unseen_side(s.comps[j]).size());
            if (large(std::min(a1, b2), two_thirds_k)) return pick("IVe", i, j);
        }
    return s;
}

namespace detail {

// State shared by the key-lemma cases: the partial map, occupied host
// vertices and the per-component territories for greedy steps.
class KeyEmbedder {
public:
    KeyEmbedder(const Graph& G, int x, const ReducedGraph& RG, const RootedTree& T, const EmbedderConfig& cfg,
                const Scenario& sc)
        : G_(G), x_(x), RG_(RG), T_(T), cfg_(cfg), sc_(sc), phi_(T.n(), -1), used_(G.n(), 0), nbr_(G.n(), 0) {
        for (int w : G.neighbors(x)) nbr_[w] = 1;
        build_territories();
    }

    Trace trace;
    std::optional<EmbedFailure> failure;

    const std::vector<int>& phi() const { return phi_; }

    void place_cut_vertex(int z) {
        phi_[z] = x_;
        used_[x_] = 1;
    }

    // Greedy minimum-degree embedding of the trees of TZ hanging from `roots`
    // into component ci; roots land in N(x) (restricted to `only` if given).
    bool greedy(const RootedTree& TZ, const std::vector<int>& roots, int ci, const std::vector<char>* only = nullptr,
                const char* label = "greedy") {
        if (roots.empty()) return true;
        std::vector<char> target(G_.n(), 0);
        for (int w : G_.neighbors(x_))
            if (territory_[ci][w] && (!only || (*only)[w])) target[w] = 1;
        std::string why;
        std::vector<int> phi = phi_;
        if (!greedy_forest(G_, TZ, roots, territory_[ci], target, used_, phi, why)) {
            fail("greedy", std::string(label) + " into component " + std::to_string(ci) + ": " + why);
            return false;
        }
        phi_ = std::move(phi);
        trace.event(std::string(label) + ": " + std::to_string(count(TZ, roots)) + " vertices into component " +
                    std::to_string(ci));
        return true;
    }

    // Sides model of component ci whose side 0 (X) is `x_side`.
    ComponentModel sides_model(int ci, const std::vector<int>& x_side) const {
        ComponentModel m = sub_model(RG_, sc_.comps[ci].clusters, RouteMode::Sides, sc_.scale);
        std::vector<char> inX(RG_.R.n(), 0);
        for (int c : x_side) inX[c] = 1;
        for (std::size_t i = 0; i < m.label.size(); ++i) m.side[i] = inX[m.label[i]] ? 0 : 1;
        return m;
    }

    // Slice-engine run of the forest of TZ hanging from `roots`, all roots on
    // side `root_side` (Sides mode) and inside N(x) restricted to `only`.
    bool slices(const ComponentModel& model, const RootedTree& TZ, const std::vector<int>& roots, int root_side,
                const std::vector<char>* only = nullptr, int max_route = 0, const char* label = "slices") {
        if (roots.empty()) return true;
        ForestSpec F{TZ, roots, std::vector<int>(roots.size(), root_side), std::vector<char>(G_.n(), 0)};
        for (int w : G_.neighbors(x_))
            if (!only || (*only)[w]) F.root_target[w] = 1;
        if (model.mode != RouteMode::Sides) F.root_side.clear();
        if (max_route == 0 && model.mode == RouteMode::Sides)
            max_route = cfg_.d > 0 ? cfg_.d : r_diameter(model.R);
        auto run = run_slices(G_, model, F, cfg_, used_, trace, max_route);
        if (!run.ok) {
            failure = run.failure;
            failure->reason = std::string(label) + ": " + failure->reason;
            return false;
        }
        for (int v = 0; v < TZ.n(); ++v)
            if (run.phi[v] >= 0) {
                phi_[v] = run.phi[v];
                used_[run.phi[v]] = 1;
            }
        trace.event(std::string(label) + ": " + std::to_string(count(TZ, roots)) + " vertices via slice engine");
        return true;
    }

    std::vector<char> cluster_mask(const std::vector<int>& ids) const {
        std::vector<char> m(G_.n(), 0);
        for (int c : ids)
            for (int h : RG_.partition.clusters[c]) m[h] = 1;
        return m;
    }

    EmbedResult finish() {
        EmbedResult res;
        res.scenario = sc_.tag;
        res.trace = std::move(trace);
        if (failure) {
            failure->scenario = sc_.tag;
            res.failure = failure;
            return res;
        }
        if (!verify_embedding(T_, G_, phi_)) throw InvariantViolation("key lemma dispatch produced an invalid map");
        res.embedding = Embedding{phi_};
        return res;
    }

    void fail(const std::string& stage, const std::string& reason) {
        EmbedFailure f;
        f.stage = stage;
        f.reason = reason;
        failure = f;
    }

    static int count(const RootedTree& TZ, const std::vector<int>& roots) {
        int n = 0;
        for (int r : roots) n += TZ.subtree_size(r);
        return n;
    }

private:
    const Graph& G_;
    int x_;
    const ReducedGraph& RG_;
    const RootedTree& T_;
    const EmbedderConfig& cfg_;
    const Scenario& sc_;
    std::vector<int> phi_;
    std::vector<char> used_, nbr_;
    std::vector<std::vector<char>> territory_;

    // Cluster vertices of the component plus unclustered vertices sharing a
    // component of G - x with them.
    void build_territories() {
        const int n = G_.n();
        std::vector<char> not_x(n, 1);
        not_x[x_] = 0;
        std::vector<int> gc(n, -1);
        int next = 0;
        for (int s = 0; s < n; ++s) {
            if (s == x_ || gc[s] >= 0) continue;
            std::vector<int> st{s};
            gc[s] = next;
            while (!st.empty()) {
                int v = st.back();
                st.pop_back();
                for (int w : G_.neighbors(v))
                    if (w != x_ && gc[w] < 0) gc[w] = next, st.push_back(w);
            }
            ++next;
        }
        auto owner = RG_.partition.cluster_of(n);
        for (const auto& comp : sc_.comps) {
            std::vector<char> t(n, 0), hit(next, 0);
            for (int c : comp.clusters)
                for (int h : RG_.partition.clusters[c]) t[h] = 1, hit[gc[h]] = 1;
            for (int v = 0; v < n; ++v)
                if (v != x_ && owner[v] < 0 && hit[gc[v]]) t[v] = 1;
            territory_.push_back(std::move(t));
        }
    }
};

inline std::pair<std::int64_t, std::int64_t> parity_counts(const RootedTree& TZ, const std::vector<int>& roots) {
    std::int64_t even = 0, all = 0;
    for (int r : roots) {
        std::vector<int> st{r};
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            ++all;
            even += (TZ.depth(v) - TZ.depth(r)) % 2 == 0;
            for (int c : TZ.children(v)) st.push_back(c);
        }
    }
    return {even, all - even};
}

struct CutGroups {
    int z;
    RootedTree TZ;                         // rooted at z
    std::vector<std::vector<int>> groups;  // roots (neighbours of z) per group
};

// Half separator from the smallest leaf; components of T - z grouped by the
// three-part (parts = 3) or two-part sequence partition.
inline CutGroups cut_groups(const RootedTree& T, int parts) {
    int z = half_separator(T, smallest_leaf(T));
    CutGroups out{z, T.root() == z ? T : T.rerooted(z), {}};
    auto comps = components_without(T, z);
    std::vector<std::int64_t> sizes;
    for (const auto& c : comps) sizes.push_back(static_cast<std::int64_t>(c.size()));
    auto P = parts == 3 ? partition_three(sizes, T.t()) : partition_two(sizes, T.t());
    for (const auto& idx : P.parts) {
        std::vector<int> roots;
        for (int i : idx) roots.push_back(comps[i].front());
        out.groups.push_back(std::move(roots));
    }
    return out;
}

}  // namespace detail

// Key-lemma dispatch on a classified reduced graph of G - x.
inline EmbedResult embed_key(const Graph& G, int x, const ReducedGraph& RG, const RootedTree& T,
                             const EmbedderConfig& cfg, const Scenario& sc) {
    if (sc.tag == "None") throw ContractViolation("embed_key: no scenario applies");
    const std::int64_t k = detail::tree_k(cfg, T);
    Trace pre;
    require_soft(Rational(degree_stats(G).min) >= (1 + cfg.theta()) * cfg.alpha * k,
                 "delta(G) >= (1+eps^(1/4)) alpha k", cfg, pre);
    require_soft(degree_within_root(T.max_degree(), k, cfg.c), "Delta(T) <= k^(1/c)", cfg, pre);
    if (sc.scale > 0)
        require_soft(Rational(T.max_degree()) <= cfg.eps / sc.scale, "Delta(T) <= eps n/|R|", cfg, pre);

    if (sc.tag == "I" || sc.tag == "II") {
        auto res = embed_connected(G, RG, sc.comps[sc.c1].clusters, whole_tree(T), cfg, sc.scale, {x});
        res.scenario = sc.tag;
        if (res.failure) res.failure->scenario = sc.tag;
        for (auto& w : pre.warnings) res.trace.warnings.insert(res.trace.warnings.begin(), w);
        if (sc.tag == "II") res.trace.event("scenario II triggered by k1; component hypotheses checked against k");
        return res;
    }

    detail::KeyEmbedder E(G, x, RG, T, cfg, sc);
    E.trace.warnings = pre.warnings;
    const auto& C1 = sc.comps[sc.c1];

    if (sc.tag == "III") {
        auto col = balanced_cut_coloring(T);
        RootedTree TZ = T.root() == col.z ? T : T.rerooted(col.z);
        E.place_cut_vertex(col.z);
        auto model = E.sides_model(sc.c1, C1.side_a);
        // colour 0 (at most 2k/3) goes to the larger side
        std::vector<int> r0, r1;
        for (int r : TZ.children(col.z)) (col.color[r] == 0 ? r0 : r1).push_back(r);
        E.trace.event("III: z = " + std::to_string(col.z) + ", |c0| = " + std::to_string(col.c0) +
                      ", |c1| = " + std::to_string(col.c1));
        ForestSpec F{TZ, {}, {}, std::vector<char>(G.n(), 0)};
        for (int r : r0) F.roots.push_back(r), F.root_side.push_back(0);
        for (int r : r1) F.roots.push_back(r), F.root_side.push_back(1);
        for (int w : G.neighbors(x)) F.root_target[w] = 1;
        std::vector<char> used(G.n(), 0);
        used[x] = 1;
        const int route = cfg.d > 0 ? cfg.d : detail::r_diameter(model.R);
        auto run = run_slices(G, model, F, cfg, used, E.trace, route);
        if (!run.ok) {
            E.failure = run.failure;
            return E.finish();
        }
        std::vector<int> phi = run.phi;
        phi[col.z] = x;
        EmbedResult res;
        res.scenario = sc.tag;
        res.trace = std::move(E.trace);
        if (!verify_embedding(T, G, phi)) throw InvariantViolation("scenario III produced an invalid map");
        res.embedding = Embedding{phi};
        return res;
    }

    if (sc.tag == "IVa") {
        auto cg = detail::cut_groups(T, 3);
        E.place_cut_vertex(cg.z);
        // larger group to the larger territory
        int a = sc.c1, b = sc.c2;
        if (sc.comps[b].vertices > sc.comps[a].vertices) std::swap(a, b);
        E.trace.event("IVa: F3 has " + std::to_string(cg.groups[2].size()) + " tree(s), sent to component " +
                      std::to_string(sc.c3));
        if (E.greedy(cg.TZ, cg.groups[0], a, nullptr, "F1") && E.greedy(cg.TZ, cg.groups[1], b, nullptr, "F2"))
            E.greedy(cg.TZ, cg.groups[2], sc.c3, nullptr, "F3");
        return E.finish();
    }

    if (sc.tag == "IVb") {
        auto cg = detail::cut_groups(T, 2);
        E.place_cut_vertex(cg.z);
        if (!E.greedy(cg.TZ, cg.groups[1], sc.c2, nullptr, "J2")) return E.finish();
        RegularPartition P;
        P.eps = RG.partition.eps;
        P.eta = RG.partition.eta;
        for (int c : C1.clusters) P.clusters.push_back(RG.partition.clusters[c]);
        auto ref = refine_cluster_matching(G, P, 0);
        ComponentModel model =
            make_model(G, ref.partition.clusters, ref.partition.eta, RouteMode::Free, 2 * sc.scale);
        VertexSet all(model.R.n());
        for (int i = 0; i < model.R.n(); ++i) all[i] = i;
        const bool usable = !ref.M.empty() && components(model.R).size() == 1 && !bipartition(model.R, all);
        if (usable) {
            model.mode = RouteMode::Matching;
            model.M = ref.M;
            E.trace.event("IVb: J1 via matching of " + std::to_string(ref.M.size()) + " half-cluster pairs");
        } else {
            E.trace.event("IVb: refined reduced graph unusable for matching routes; free routing on C1");
        }
        E.slices(model, cg.TZ, cg.groups[0], 0, nullptr, 0, "J1");
        return E.finish();
    }

    if (sc.tag == "IVc") {
        auto cg = detail::cut_groups(T, 3);
        E.place_cut_vertex(cg.z);
        if (!E.greedy(cg.TZ, cg.groups[0], sc.c2, nullptr, "F1")) return E.finish();
        // A: the side with the larger share of neighbours of x
        const bool a_first = C1.nx_a * C1.vertices_b >= C1.nx_b * C1.vertices_a;
        const auto& A = a_first ? C1.side_a : C1.side_b;
        const auto& B = a_first ? C1.side_b : C1.side_a;
        auto inA = E.cluster_mask(A), inB = E.cluster_mask(B);
        auto [e2, o2] = detail::parity_counts(cg.TZ, cg.groups[1]);
        if (!cg.groups[2].empty()) {
            auto [e3, o3] = detail::parity_counts(cg.TZ, cg.groups[2]);
            // the larger class of F3 joins the smaller class of F2
            const bool big3_to_A = e2 <= o2;
            const bool root_to_A = (e3 >= o3) == big3_to_A;
            E.trace.event(std::string("IVc: F3 root to ") + (root_to_A ? "A" : "B"));
            if (!E.greedy(cg.TZ, cg.groups[2], sc.c1, root_to_A ? &inA : &inB, "F3")) return E.finish();
        }
        auto model = E.sides_model(sc.c1, A);
        E.slices(model, cg.TZ, cg.groups[1], 0, &inA, 0, "F2");
        return E.finish();
    }

    if (sc.tag == "IVd") {
        auto cg = detail::cut_groups(T, 2);
        E.place_cut_vertex(cg.z);
        if (!E.greedy(cg.TZ, cg.groups[1], sc.c2, nullptr, "J2")) return E.finish();
        const auto& A = C1.nx_a > 0 ? C1.side_a : C1.side_b;
        auto model = E.sides_model(sc.c1, A);
        E.slices(model, cg.TZ, cg.groups[0], 0, nullptr, 0, "J1");
        return E.finish();
    }

    // IVe
    auto cg = detail::cut_groups(T, 2);
    E.place_cut_vertex(cg.z);
    auto [e1, o1] = detail::parity_counts(cg.TZ, cg.groups[0]);
    const int into = e1 >= o1 ? sc.c1 : sc.c2, rest = e1 >= o1 ? sc.c2 : sc.c1;
    const auto& Ci = sc.comps[into];
    const auto& Ai = Ci.nx_a > 0 ? Ci.side_a : Ci.side_b;
    E.trace.event("IVe: J1 into component " + std::to_string(into));
    auto model = E.sides_model(into, Ai);
    if (E.slices(model, cg.TZ, cg.groups[0], 0, nullptr, 0, "J1")) E.greedy(cg.TZ, cg.groups[1], rest, nullptr, "J2");
    return E.finish();
}

inline EmbedResult embed_key(const Graph& G, int x, const ReducedGraph& RG, const RootedTree& T,
                             const EmbedderConfig& cfg) {
    auto [a, b] = tree_bipartition_sizes(T);
    auto sc = classify_scenario(G, x, RG, detail::tree_k(cfg, T), std::max(a, b), cfg);
    if (sc.tag == "None") {
        EmbedResult res;
        res.scenario = "None";
        EmbedFailure f;
        f.stage = "scenario";
        f.scenario = "None";
        f.reason = "no key-lemma scenario applies";
        res.failure = f;
        return res;
    }
    return embed_key(G, x, RG, T, cfg, sc);
}

}  // namespace treembed
