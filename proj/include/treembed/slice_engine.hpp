#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/maximum_weighted_matching.hpp>

#include "embedder_core.hpp"
#include "matching.hpp"
#include "tree_cut.hpp"

namespace treembed {

// How pieces are routed to their final pair of C-slices.
//  Sides:    bipartite R, every cluster has a side, pattern sides fixed by parity.
//  Free:     any R-edge can take a piece (nonbipartite first phase).
//  Matching: only pairs of the given cluster matching take pieces.
enum class RouteMode { Sides, Free, Matching };

struct ComponentModel {
    std::vector<VertexSet> clusters;
    std::vector<std::vector<double>> density;
    Graph R;
    RouteMode mode = RouteMode::Free;
    std::vector<int> side;               // Sides: 0 = X, 1 = Y
    std::vector<std::pair<int, int>> M;  // Matching
    Rational scale{0};                   // |R|/n of the ambient partition
    std::vector<int> label;              // cluster ids for diagnostics
};

// Model on `ids` of a reduced graph, with R-edges and densities inherited.
inline ComponentModel sub_model(const ReducedGraph& RG, const std::vector<int>& ids, RouteMode mode,
                                const Rational& scale) {
    ComponentModel m;
    m.mode = mode;
    m.scale = scale;
    m.label = ids;
    const int l = static_cast<int>(ids.size());
    std::vector<int> pos(RG.R.n(), -1);
    for (int i = 0; i < l; ++i) pos[ids[i]] = i;
    std::vector<std::pair<int, int>> e;
    m.density.assign(l, std::vector<double>(l, 0.0));
    for (int i = 0; i < l; ++i) {
        m.clusters.push_back(RG.partition.clusters[ids[i]]);
        for (int j = 0; j < l; ++j)
            if (i != j) m.density[i][j] = static_cast<double>(to_real(RG.partition.density[ids[i]][ids[j]]));
        for (int w : RG.R.neighbors(ids[i]))
            if (pos[w] > i) e.emplace_back(i, pos[w]);
    }
    m.R = Graph(l, e);
    if (mode == RouteMode::Sides) {
        VertexSet all(l);
        for (int i = 0; i < l; ++i) all[i] = i;
        auto b = bipartition(m.R, all);
        if (!b) throw PreconditionError("R-component is bipartite");
        m.side.assign(l, 0);
        for (int c : b->classB) m.side[c] = 1;
    }
    return m;
}

// Model on arbitrary clusters with R-edges of density > eta.
inline ComponentModel make_model(const Graph& G, const std::vector<VertexSet>& clusters, const Rational& eta,
                                 RouteMode mode, const Rational& scale) {
    ReducedGraph RG;
    RG.partition.clusters = clusters;
    RG.partition.eta = eta;
    RG.partition.density = density_matrix(G, clusters);
    const int l = static_cast<int>(clusters.size());
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j)
            if (RG.partition.density[i][j] > eta) e.emplace_back(i, j);
    RG.R = Graph(l, e);
    std::vector<int> ids(l);
    for (int i = 0; i < l; ++i) ids[i] = i;
    return sub_model(RG, ids, mode, scale);
}

// Pattern forest: the subtrees of T hanging from `roots`. root_side (Sides
// mode) gives each root's host side; empty means the heavier colour class of
// each tree goes to X. root_target, when non-empty, restricts root images.
struct ForestSpec {
    RootedTree T;
    std::vector<int> roots;
    std::vector<int> root_side;
    std::vector<char> root_target;
};

inline ForestSpec whole_tree(const RootedTree& T) { return ForestSpec{T, {T.root()}, {}, {}}; }

struct ForestRun {
    bool ok = false;
    std::vector<int> phi;  // -1 outside the forest
    EmbedFailure failure;
    int stopped_cluster = -1;  // model index
    std::vector<std::array<int, 3>> free_left;  // per cluster S, L, C
};

namespace detail {

inline int r_diameter(const Graph& R) {
    VertexSet all(R.n());
    for (int i = 0; i < R.n(); ++i) all[i] = i;
    return diameter(R, all);
}

class SliceEngine {
public:
    static constexpr int S = 0, L = 1, C = 2;

    SliceEngine(const Graph& G, const ComponentModel& model, const EmbedderConfig& cfg, std::vector<char> used,
                Trace& trace, int max_route)
        : G_(G), M_(model), cfg_(cfg), used_(std::move(used)), tr_(trace), max_route_(max_route) {
        const int l = static_cast<int>(M_.clusters.size());
        cluster_of_.assign(G_.n(), -1);
        slice_of_.assign(G_.n(), -1);
        free_.assign(l, {0, 0, 0});
        size_.assign(l, 0);
        const Rational se = cfg_.sqrt_eps();
        for (int c = 0; c < l; ++c) {
            VertexSet mem = M_.clusters[c];
            std::sort(mem.begin(), mem.end());
            const std::int64_t m = static_cast<std::int64_t>(mem.size());
            const std::int64_t sz = ceil_of(10 * se * m);
            require_hard(2 * sz < m, "2 ceil(10 sqrt(eps) m) < m (cluster of size " + std::to_string(m) + ")");
            size_[c] = static_cast<int>(m);
            for (std::int64_t i = 0; i < m; ++i) {
                int h = mem[i];
                if (cluster_of_[h] >= 0) throw ContractViolation("clusters overlap");
                cluster_of_[h] = c;
                slice_of_[h] = i < sz ? S : i < 2 * sz ? L : C;
                if (!used_[h]) ++free_[c][slice_of_[h]];
            }
        }
        dist_.assign(l, std::vector<int>(l, -1));
        for (int c = 0; c < l; ++c) {
            auto d = bfs_distances(M_.R, c);
            for (int j = 0; j < l; ++j) dist_[c][j] = d[j];
        }
        cnt_.assign(static_cast<std::size_t>(l) * 3, 0);
        if (M_.mode == RouteMode::Matching)
            for (auto [a, b] : M_.M)
                if (!M_.R.adjacent(a, b)) throw ContractViolation("matching pair is not an R-edge");
    }

    ForestRun run(const ForestSpec& F) {
        ForestRun out;
        phi_.assign(F.T.n(), -1);
        T_ = &F.T;
        side_.assign(F.T.n(), -1);
        target_ = &F.root_target;
        const Rational beta = cfg_.beta.value_or(cfg_.eps / Rational(std::max<int>(1, M_.R.n())));
        for (std::size_t r = 0; r < F.roots.size(); ++r) {
            // local tree of the subtree below the root
            const int root = F.roots[r];
            std::vector<int> verts{root};
            for (std::size_t i = 0; i < verts.size(); ++i)
                for (int ch : F.T.children(verts[i])) verts.push_back(ch);
            std::map<int, int> loc;
            for (std::size_t i = 0; i < verts.size(); ++i) loc[verts[i]] = static_cast<int>(i);
            std::vector<int> par(verts.size());
            for (std::size_t i = 0; i < verts.size(); ++i)
                par[i] = i == 0 ? 0 : loc[F.T.parent(verts[i])];
            RootedTree local(par);
            if (M_.mode == RouteMode::Sides) {
                int rs;
                if (!F.root_side.empty()) {
                    rs = F.root_side[r];
                } else {
                    int even = 0;
                    for (int v = 0; v < local.n(); ++v) even += local.depth(v) % 2 == 0;
                    rs = 2 * even >= local.n() ? 0 : 1;
                }
                for (std::size_t i = 0; i < verts.size(); ++i) side_[verts[i]] = (rs + local.depth(i)) % 2;
            }
            auto D = decompose_pieces(local, beta);
            is_seed_.assign(F.T.n(), 0);
            for (int s : D.seeds) is_seed_[verts[s]] = 1;
            piece_root_.assign(F.T.n(), 0);
            for (const auto& p : D.pieces) piece_root_[verts[p.root]] = 1;
            for (int e : D.order) {
                bool ok;
                if (e >= 0) {
                    ok = place_seed(verts[D.seeds[e]], verts[D.seeds[e]] == root, out);
                } else {
                    const auto& p = D.pieces[-1 - e];
                    std::vector<int> pv;
                    for (int v : p.vertices) pv.push_back(verts[v]);
                    ok = place_piece(pv, verts[p.attached_to], out);
                }
                if (!ok) {
                    out.phi = phi_;
                    out.free_left = free_;
                    out.failure.fill = fill();
                    return out;
                }
            }
        }
        out.ok = true;
        out.phi = phi_;
        out.free_left = free_;
        return out;
    }

    const std::vector<char>& used() const { return used_; }

private:
    const Graph& G_;
    const ComponentModel& M_;
    const EmbedderConfig& cfg_;
    std::vector<char> used_;
    Trace& tr_;
    int max_route_;

    std::vector<int> cluster_of_, slice_of_, size_;
    std::vector<std::array<int, 3>> free_;
    std::vector<std::vector<int>> dist_;
    std::vector<int> cnt_;

    const RootedTree* T_ = nullptr;
    const std::vector<char>* target_ = nullptr;
    std::vector<int> phi_, side_;
    std::vector<char> is_seed_, piece_root_;
    std::vector<std::pair<int, int>> placed_;

    struct Route {
        std::vector<int> lcl;  // cluster per L-level
        int E = -1, F = -1;    // C-slice clusters for residual levels L, L+1, ...
    };

    nlohmann::json fill() const {
        auto out = nlohmann::json::array();
        for (std::size_t c = 0; c < free_.size(); ++c) {
            int sz_s = 0, sz_l = 0;
            for (int h : M_.clusters[c]) sz_s += slice_of_[h] == S, sz_l += slice_of_[h] == L;
            int sz_c = size_[c] - sz_s - sz_l;
            auto pct = [](int fr, int sz) { return sz == 0 ? 0.0 : 100.0 * (sz - fr) / sz; };
            out.push_back({{"cluster", M_.label.empty() ? static_cast<int>(c) : M_.label[c]},
                           {"S", pct(free_[c][S], sz_s)},
                           {"L", pct(free_[c][L], sz_l)},
                           {"C", pct(free_[c][C], sz_c)}});
        }
        return out;
    }

    void place(int v, int h) {
        phi_[v] = h;
        used_[h] = 1;
        if (cluster_of_[h] >= 0) --free_[cluster_of_[h]][slice_of_[h]];
        placed_.emplace_back(v, h);
    }

    void rollback(std::size_t to) {
        while (placed_.size() > to) {
            auto [v, h] = placed_.back();
            placed_.pop_back();
            phi_[v] = -1;
            used_[h] = 0;
            if (cluster_of_[h] >= 0) ++free_[cluster_of_[h]][slice_of_[h]];
        }
    }

    // Free neighbours of h per (cluster, slice); returns touched clusters.
    std::vector<int> profile(int h) {
        std::vector<int> touched;
        for (int w : G_.neighbors(h)) {
            int c = cluster_of_[w];
            if (c < 0 || used_[w]) continue;
            int* row = &cnt_[static_cast<std::size_t>(c) * 3];
            if (row[0] + row[1] + row[2] == 0) touched.push_back(c);
            ++row[slice_of_[w]];
        }
        return touched;
    }
    void clear(const std::vector<int>& touched) {
        for (int c : touched) cnt_[c * 3] = cnt_[c * 3 + 1] = cnt_[c * 3 + 2] = 0;
    }
    int count(int c, int s) const { return cnt_[static_cast<std::size_t>(c) * 3 + s]; }

    // Typical towards the free S- and L-slices of some R-neighbour.
    bool typical(int c) const {
        const double e = static_cast<double>(to_real(cfg_.eps));
        for (int u : M_.R.neighbors(c)) {
            double d = M_.density[c][u] - e;
            bool s_ok = free_[u][S] == 0 || count(u, S) > d * free_[u][S];
            bool l_ok = free_[u][L] == 0 || count(u, L) > d * free_[u][L];
            if (s_ok && l_ok) return true;
        }
        return false;
    }

    int seed_room(int c) const {
        int r = 0;
        for (int u : M_.R.neighbors(c)) r += count(u, S);
        return r;
    }

    std::pair<int, int> child_counts(int v) const {
        int seeds = 0, rest = 0;
        for (int ch : T_->children(v)) (is_seed_[ch] ? seeds : rest) += 1;
        return {seeds, rest};
    }

    bool side_ok(int v, int c) const { return M_.mode != RouteMode::Sides || M_.side[c] == side_[v]; }

    bool place_seed(int v, bool forest_root, ForestRun& out) {
        auto [seed_kids, piece_kids] = child_counts(v);
        std::vector<int> pool;
        int parent_cluster = -1;
        const bool targeted = forest_root && !target_->empty();
        if (forest_root) {
            for (int h = 0; h < G_.n(); ++h) {
                int c = cluster_of_[h];
                if (c < 0 || used_[h] || !side_ok(v, c)) continue;
                if (targeted ? (*target_)[h] : slice_of_[h] == S) pool.push_back(h);
            }
        } else {
            int a = phi_[T_->parent(v)];
            parent_cluster = cluster_of_[a];
            for (int h : G_.neighbors(a)) {
                int c = cluster_of_[h];
                if (c < 0 || used_[h] || slice_of_[h] != S || !side_ok(v, c)) continue;
                if (parent_cluster >= 0 && !M_.R.adjacent(parent_cluster, c)) continue;
                pool.push_back(h);
            }
        }
        int best = -1, valid = 0;
        std::tuple<int, int, int> best_key{-1, -1, -1};
        for (int h : pool) {
            int c = cluster_of_[h];
            auto touched = profile(h);
            int room_seed = seed_room(c), room_rest = 0;
            for (int u : M_.R.neighbors(c)) room_rest += count(u, L) + count(u, C);
            bool fits = room_seed >= seed_kids && room_rest >= piece_kids;
            std::tuple<int, int, int> key{slice_of_[h] == S ? 1 : 0, typical(c) ? 1 : 0, room_seed + room_rest};
            clear(touched);
            if (!fits) continue;
            ++valid;
            if (key > best_key) best_key = key, best = h;
        }
        tr_.min_candidates = std::min(tr_.min_candidates, valid);
        if (best < 0) {
            out.failure.stage = "seed";
            out.failure.reason = "no free S-slice image for seed " + std::to_string(v);
            out.failure.starved_slice = "S";
            out.failure.stopped_seed = v;
            out.failure.starved_cluster = parent_cluster >= 0 ? label(parent_cluster) : -1;
            out.stopped_cluster = parent_cluster;
            return false;
        }
        if (slice_of_[best] != S) ++tr_.seeds_outside_S;
        if (!std::get<1>(best_key)) ++tr_.atypical;
        place(v, best);
        return true;
    }

    int label(int c) const { return M_.label.empty() ? c : M_.label[c]; }

    // Walk Q = w0, w1, ..., wl = E of length exactly `len` (>= 1), or empty.
    std::vector<int> walk_of_length(int Q, int E, int len) const {
        const int l = M_.R.n();
        // shortest walk per (cluster, parity)
        std::vector<std::array<int, 2>> d(l, {-1, -1}), from(l, {-1, -1});
        std::vector<std::pair<int, int>> q{{Q, 0}};
        d[Q][0] = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            auto [c, p] = q[i];
            for (int w : M_.R.neighbors(c))
                if (d[w][1 - p] < 0) {
                    d[w][1 - p] = d[c][p] + 1;
                    from[w][1 - p] = c;
                    q.emplace_back(w, 1 - p);
                }
        }
        int par = len % 2;
        if (d[E][par] < 0 || d[E][par] > len) return {};
        std::vector<int> w{E};
        for (int c = E, p = par; !(c == Q && p == 0 && d[c][p] == 0);) {
            int prev = from[c][p];
            p = 1 - p;
            c = prev;
            w.push_back(c);
        }
        std::reverse(w.begin(), w.end());
        if (w.size() < 2) {
            // E == Q with an even target length: step out and back
            if (M_.R.degree(Q) == 0) return {};
            w = {Q, M_.R.neighbors(Q).front(), Q};
        }
        // pad with back-and-forth steps on the edge with the most free L-space
        int extra = len - (static_cast<int>(w.size()) - 1);
        if (extra > 0) {
            std::size_t at = 0;
            int best = -1;
            for (std::size_t i = 0; i + 1 < w.size(); ++i) {
                int room = std::min(free_[w[i]][L], free_[w[i + 1]][L]);
                if (room > best) best = room, at = i;
            }
            std::vector<int> bounce;
            for (int i = 0; i < extra / 2; ++i) bounce.push_back(w[at + 1]), bounce.push_back(w[at]);
            w.insert(w.begin() + static_cast<long>(at) + 1, bounce.begin(), bounce.end());
        }
        return w;
    }

    std::vector<int> shortest_path(int Q, int W) const {
        std::vector<int> path{W};
        for (int c = W; c != Q;) {
            // neighbour one step closer to Q, smallest id first
            for (int u : M_.R.neighbors(c))
                if (dist_[Q][u] == dist_[Q][c] - 1) {
                    c = u;
                    break;
                }
            path.push_back(c);
        }
        std::reverse(path.begin(), path.end());
        return path;
    }

    std::vector<Route> routes(int Q, const std::vector<int>& level_count) {
        std::vector<std::pair<std::tuple<int, int, int>, Route>> cand;
        const std::int64_t m = size_[Q];
        const int good = static_cast<int>(ceil_of(5 * cfg_.sqrt_eps() * m));
        auto residual = [&](int Lv, int parity) {
            int s = 0;
            for (std::size_t j = Lv + parity; j < level_count.size(); j += 2) s += level_count[j];
            return s;
        };
        auto fits = [&](const Route& r) {
            if (free_[r.E][C] < good || free_[r.F][C] < good) return false;
            const int Lv = static_cast<int>(r.lcl.size());
            if (residual(Lv, 0) > free_[r.E][C] || residual(Lv, 1) > free_[r.F][C]) return false;
            std::map<int, int> need;
            for (int j = 0; j < Lv && j < static_cast<int>(level_count.size()); ++j) need[r.lcl[j]] += level_count[j];
            for (auto [c, k] : need)
                if (k > free_[c][L]) return false;
            return true;
        };
        auto add = [&](Route r) {
            if (!fits(r)) return;
            int key = std::min(free_[r.E][C], free_[r.F][C]);
            cand.push_back({{-key, r.E, r.F}, std::move(r)});
        };
        const int l = M_.R.n();
        if (M_.mode == RouteMode::Matching) {
            const int d = cfg_.d > 0 ? cfg_.d : std::max(1, r_diameter(M_.R));
            for (auto [a, b] : M_.M) {
                {
                    auto build = [&](int E, int F) -> std::optional<Route> {
                        std::vector<int> w;
                        if (cfg_.exact_walks) {
                            w = walk_of_length(Q, E, 3 * d + 1);
                        } else {
                            int best = -1;
                            for (int len = 1; len <= 2 * l + 2; ++len) {
                                w = walk_of_length(Q, E, len);
                                if (!w.empty()) {
                                    best = len;
                                    break;
                                }
                            }
                            if (best < 0) w.clear();
                        }
                        if (w.empty()) return std::nullopt;
                        Route r;
                        r.lcl.assign(w.begin() + 1, w.end() - 1);
                        r.E = E;
                        r.F = F;
                        return r;
                    };
                    std::optional<Route> ra = build(a, b), rb = build(b, a);
                    std::optional<Route> pick;
                    auto heavier_first = [&](const Route& r) {
                        int Lv = static_cast<int>(r.lcl.size());
                        return residual(Lv, 0) >= residual(Lv, 1);
                    };
                    // E receives residual levels L, L+2, ...; prefer the orientation
                    // where the heavier class lands in the emptier slice.
                    auto score = [&](const Route& r) {
                        bool heavy_to_E = heavier_first(r);
                        int e_free = free_[r.E][C], f_free = free_[r.F][C];
                        bool good_side = heavy_to_E ? (e_free > f_free || (e_free == f_free && r.E < r.F))
                                                    : (f_free > e_free || (e_free == f_free && r.F < r.E));
                        return good_side;
                    };
                    if (ra && score(*ra)) pick = ra;
                    else if (rb && score(*rb)) pick = rb;
                    else pick = ra ? ra : rb;
                    if (pick) add(*pick);
                }
            }
        } else {
            for (int W = 0; W < l; ++W) {
                int t = dist_[Q][W];
                if (t < 1 || (max_route_ > 0 && t > max_route_)) continue;
                for (int Z : M_.R.neighbors(W)) {
                    Route r;
                    auto path = shortest_path(Q, W);
                    r.lcl.assign(path.begin() + 1, path.end() - 1);
                    r.E = W;
                    r.F = Z;
                    add(std::move(r));
                }
            }
        }
        std::stable_sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        std::vector<Route> out;
        for (auto& c : cand) out.push_back(std::move(c.second));
        return out;
    }

    bool place_piece(const std::vector<int>& pv, int attach, ForestRun& out) {
        const int a = phi_[attach];
        const int Q = cluster_of_[a];
        const int base = T_->depth(pv.front());
        std::vector<int> order = pv;
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return T_->depth(x) < T_->depth(y); });
        std::vector<int> level_count;
        for (int v : order) {
            int j = T_->depth(v) - base;
            if (static_cast<int>(level_count.size()) <= j) level_count.resize(j + 1, 0);
            ++level_count[j];
        }
        auto rs = routes(Q, level_count);
        if (rs.empty()) {
            out.failure.stage = "piece";
            out.failure.reason = "no good pair within reach of cluster " + std::to_string(label(Q));
            out.failure.starved_slice = "C";
            out.failure.starved_cluster = label(Q);
            out.failure.stopped_seed = attach;
            out.stopped_cluster = Q;
            return false;
        }
        std::string last_reason;
        int last_cluster = -1, last_level = -1;
        std::string last_slice;
        for (const auto& r : rs) {
            const int Lv = static_cast<int>(r.lcl.size());
            auto target = [&](int j) -> std::pair<int, int> {
                if (j < Lv) return {r.lcl[j], L};
                return {(j - Lv) % 2 == 0 ? r.E : r.F, C};
            };
            const std::size_t mark = placed_.size();
            bool ok = true;
            for (int v : order) {
                const int j = T_->depth(v) - base;
                auto [tc, ts] = target(j);
                auto [nc, ns] = target(j + 1);
                auto [seed_kids, piece_kids] = child_counts(v);
                const int parent_img = phi_[T_->parent(v)];
                int best = -1, valid = 0;
                std::tuple<int, int> best_key{-1, -1};
                for (int h : G_.neighbors(parent_img)) {
                    if (used_[h] || cluster_of_[h] != tc || slice_of_[h] != ts || !side_ok(v, tc)) continue;
                    auto touched = profile(h);
                    int next_room = count(nc, ns), room_seed = seed_room(tc);
                    bool fits = next_room >= piece_kids && room_seed >= seed_kids;
                    std::tuple<int, int> key{typical(tc) ? 1 : 0, next_room + room_seed};
                    clear(touched);
                    if (!fits) continue;
                    ++valid;
                    if (key > best_key) best_key = key, best = h;
                }
                tr_.min_candidates = std::min(tr_.min_candidates, valid);
                if (best < 0) {
                    ok = false;
                    last_reason = "no image for piece vertex " + std::to_string(v) + " at piece level " +
                                  std::to_string(j);
                    last_cluster = label(tc);
                    last_slice = ts == L ? "L" : "C";
                    last_level = j;
                    break;
                }
                if (!std::get<0>(best_key)) ++tr_.atypical;
                if (j < Lv && slice_of_[best] != L) ++tr_.prefix_outside_L;
                place(v, best);
            }
            if (ok) {
                if (M_.mode == RouteMode::Matching) {
                    int used_e = size_[r.E] - free_[r.E][C], used_f = size_[r.F] - free_[r.F][C];
                    tr_.balance.push_back({{"pair", {label(std::min(r.E, r.F)), label(std::max(r.E, r.F))}},
                                           {"deviation", std::abs(used_e - used_f)},
                                           {"eps_m", static_cast<double>(to_real(cfg_.eps * size_[r.E]))},
                                           {"piece_imbalance", [&] {
                                                int e0 = 0, e1 = 0;
                                                for (std::size_t j = Lv; j < level_count.size(); ++j)
                                                    ((j - Lv) % 2 == 0 ? e0 : e1) += level_count[j];
                                                return std::abs(e0 - e1);
                                            }()}});
                }
                return true;
            }
            rollback(mark);
        }
        out.failure.stage = "piece";
        out.failure.reason = last_reason + " (all " + std::to_string(rs.size()) + " good pairs tried)";
        out.failure.starved_cluster = last_cluster;
        out.failure.starved_slice = last_slice;
        out.failure.starved_level = last_level;
        out.failure.stopped_seed = attach;
        out.stopped_cluster = Q;
        return false;
    }
};

inline int forest_vertex_count(const ForestSpec& F) {
    int n = 0;
    for (int r : F.roots) n += F.T.subtree_size(r);
    return n;
}

// Heavier class of the forest against the free X side, lighter against Y.
inline void check_side_capacity(const Graph& G, const ComponentModel& model, const ForestSpec& F,
                                const std::vector<char>& used) {
    std::int64_t freeX = 0, freeY = 0, total = 0;
    for (std::size_t c = 0; c < model.clusters.size(); ++c)
        for (int h : model.clusters[c])
            if (!used[h]) {
                ++total;
                if (model.mode == RouteMode::Sides) (model.side[c] == 0 ? freeX : freeY) += 1;
            }
    require_hard(forest_vertex_count(F) <= total, "|T| <= free vertices of the component");
    if (model.mode != RouteMode::Sides) return;
    std::int64_t onX = 0, onY = 0;
    for (std::size_t r = 0; r < F.roots.size(); ++r) {
        int root = F.roots[r];
        std::int64_t even = 0, all = 0;
        std::vector<int> st{root};
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            ++all;
            even += (F.T.depth(v) - F.T.depth(root)) % 2 == 0;
            for (int c : F.T.children(v)) st.push_back(c);
        }
        int rs = F.root_side.empty() ? (2 * even >= all ? 0 : 1) : F.root_side[r];
        (rs == 0 ? onX : onY) += even;
        (rs == 0 ? onY : onX) += all - even;
    }
    (void)G;
    require_hard(onX <= freeX, "forest class on X (" + std::to_string(onX) + ") <= free |X| (" +
                                   std::to_string(freeX) + ")");
    require_hard(onY <= freeY, "forest class on Y (" + std::to_string(onY) + ") <= free |Y| (" +
                                   std::to_string(freeY) + ")");
}

inline int tree_k(const EmbedderConfig& cfg, const RootedTree& T) { return cfg.k > 0 ? cfg.k : T.t(); }

}  // namespace detail

// Low-level entry: run the slice engine on a forest. `used` marks host
// vertices that are off limits (already occupied or avoided).
inline ForestRun run_slices(const Graph& G, const ComponentModel& model, const ForestSpec& F,
                            const EmbedderConfig& cfg, const std::vector<char>& used, Trace& trace,
                            int max_route = 0) {
    detail::check_side_capacity(G, model, F, used);
    detail::SliceEngine eng(G, model, cfg, used, trace, max_route);
    return eng.run(F);
}

namespace detail {

inline EmbedResult finish(const Graph& G, const RootedTree& T, ForestRun run, Trace trace) {
    EmbedResult res;
    res.trace = std::move(trace);
    if (!run.ok) {
        res.failure = run.failure;
        return res;
    }
    if (!verify_embedding(T, G, run.phi)) throw InvariantViolation("slice engine produced an invalid map");
    res.embedding = Embedding{run.phi};
    return res;
}

inline std::vector<char> avoid_mask(const Graph& G, const VertexSet& avoid) { return membership(G.n(), avoid); }

}  // namespace detail

// Bipartite component embedder. The heavier colour class of T goes to X
// (model side 0); pieces travel along shortest paths to a good pair.
inline EmbedResult embed_bipartite_component(const Graph& G, const ComponentModel& model, const ForestSpec& F,
                                             const EmbedderConfig& cfg, const VertexSet& avoid = {}) {
    Trace tr;
    if (model.mode != RouteMode::Sides) throw ContractViolation("embed_bipartite_component needs a Sides model");
    require_hard(model.R.n() > 0 && components(model.R).size() == 1, "R-component is connected");
    const Rational se = cfg.sqrt_eps();
    const std::int64_t k = detail::tree_k(cfg, F.T);
    const int diam = detail::r_diameter(model.R);
    const int d = cfg.d > 0 ? cfg.d : diam;
    require_soft(diam <= d, "diam(R) <= d", cfg, tr);
    Rational need_deg = (1 + 100 * se) * Rational(k, 2) * model.scale;
    std::int64_t x_size = 0;
    for (std::size_t c = 0; c < model.clusters.size(); ++c) {
        if (model.side[c] != 0) continue;
        ++x_size;
        require_soft(Rational(model.R.degree(static_cast<int>(c))) >= need_deg,
                     "deg_R(X) >= (1+100 sqrt(eps)) (k/2) |R|/n", cfg, tr);
    }
    require_soft(Rational(x_size) >= (1 + 100 * se) * k * model.scale, "|X| >= (1+100 sqrt(eps)) k |R|/n", cfg, tr);
    require_soft(degree_within_root(F.T.max_degree(), k, d), "Delta(T) <= k^(1/d)", cfg, tr);
    if (F.roots.size() > 1) {
        Rational cap = model.scale == 0 ? Rational(0) : cfg.eps / model.scale;
        require_soft(Rational(static_cast<std::int64_t>(F.roots.size())) <= cap, "number of roots <= eps n/|R|", cfg,
                     tr);
    }
    auto run = run_slices(G, model, F, cfg, detail::avoid_mask(G, avoid), tr, d);
    return detail::finish(G, F.T, std::move(run), std::move(tr));
}

// Nonbipartite component embedder: pieces only end in pairs of model.M.
inline EmbedResult embed_nonbipartite_component(const Graph& G, const ComponentModel& model, const ForestSpec& F,
                                                const EmbedderConfig& cfg, const VertexSet& avoid = {}) {
    Trace tr;
    if (model.mode != RouteMode::Matching) throw ContractViolation("embed_nonbipartite_component needs a Matching model");
    require_hard(model.R.n() > 0 && components(model.R).size() == 1, "R-component is connected");
    {
        VertexSet all(model.R.n());
        for (int i = 0; i < model.R.n(); ++i) all[i] = i;
        require_hard(!bipartition(model.R, all).has_value(), "R-component is nonbipartite");
    }
    const Rational se = cfg.sqrt_eps();
    const std::int64_t k = detail::tree_k(cfg, F.T);
    const int diam = detail::r_diameter(model.R);
    const int d = cfg.d > 0 ? cfg.d : diam;
    require_soft(diam <= d, "diam(R) <= d", cfg, tr);
    require_soft(Rational(2 * static_cast<std::int64_t>(model.M.size())) >= (1 + 100 * se) * k * model.scale,
                 "|V(M)| >= (1+100 sqrt(eps)) k |R|/n", cfg, tr);
    require_soft(degree_within_root(F.T.max_degree(), k, 3 * d + 1), "Delta(T) <= k^(1/(3d+1))", cfg, tr);
    auto run = run_slices(G, model, F, cfg, detail::avoid_mask(G, avoid), tr);
    if (run.ok) {
        std::int64_t worst = 0;
        for (const auto& b : tr.balance) worst = std::max<std::int64_t>(worst, b["deviation"].get<std::int64_t>());
        tr.event("max C-occupancy deviation over M-pairs: " + std::to_string(worst));
    }
    return detail::finish(G, F.T, std::move(run), std::move(tr));
}

namespace detail {

// Matching of R[H] maximising the number of covered clusters from `want`.
inline std::vector<std::pair<int, int>> covering_matching(const Graph& R, const std::vector<int>& H,
                                                          const std::vector<char>& want) {
    using Weight = boost::property<boost::edge_weight_t, long>;
    using BG = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property, Weight>;
    const int h = static_cast<int>(H.size());
    BG g(h);
    std::vector<int> pos(R.n(), -1);
    for (int i = 0; i < h; ++i) pos[H[i]] = i;
    for (int i = 0; i < h; ++i)
        for (int w : R.neighbors(H[i]))
            if (pos[w] > i) {
                long wt = static_cast<long>(h + 1) * (want[H[i]] + want[w]) + 1;
                boost::add_edge(i, pos[w], Weight(wt), g);
            }
    std::vector<boost::graph_traits<BG>::vertex_descriptor> mate(h);
    boost::maximum_weighted_matching(g, &mate[0]);
    std::vector<std::pair<int, int>> M;
    for (int i = 0; i < h; ++i)
        if (mate[i] != boost::graph_traits<BG>::null_vertex() && static_cast<int>(mate[i]) > i)
            M.emplace_back(H[i], H[mate[i]]);
    return M;
}

}  // namespace detail

// Two-phase embedding into a connected R-component. Phase 1 routes pieces
// to good pairs within distance d1 + 1 of the seed's cluster. If it stalls,
// the neighbourhood of the stall decides the restart: a covering matching
// when it is nonbipartite, a one-sided bipartite run otherwise.
inline EmbedResult embed_connected(const Graph& G, const ReducedGraph& RG, const std::vector<int>& component,
                                   const ForestSpec& F, const EmbedderConfig& cfg, const Rational& scale,
                                   const VertexSet& avoid = {}) {
    Trace tr;
    const Rational se = cfg.sqrt_eps();
    const std::int64_t k = detail::tree_k(cfg, F.T);
    ComponentModel whole = sub_model(RG, component, RouteMode::Free, scale);
    require_hard(whole.R.n() > 0 && components(whole.R).size() == 1, "R-component is connected");
    {
        VertexSet hv;
        for (const auto& c : whole.clusters) hv.insert(hv.end(), c.begin(), c.end());
        std::sort(hv.begin(), hv.end());
        Graph Gc = induced_subgraph(G, hv);
        require_soft(Rational(degree_stats(Gc).min) >= (1 + 100 * se) * cfg.alpha * k,
                     "delta(G) >= (1+100 sqrt(eps)) alpha k", cfg, tr);
        VertexSet all(whole.R.n());
        for (int i = 0; i < whole.R.n(); ++i) all[i] = i;
        if (auto b = bipartition(whole.R, all)) {
            std::int64_t big = static_cast<std::int64_t>(b->classA.size());
            require_soft(Rational(big) >= (1 + 100 * se) * k * scale, "|A| >= (1+100 sqrt(eps)) k |R|/n", cfg, tr);
        } else {
            require_soft(Rational(static_cast<std::int64_t>(hv.size())) >= (1 + 100 * se) * k,
                         "n >= (1+100 sqrt(eps)) k", cfg, tr);
        }
    }
    require_soft(degree_within_root(F.T.max_degree(), k, cfg.c), "Delta(T) <= k^(1/c)", cfg, tr);

    const auto mask = detail::avoid_mask(G, avoid);
    auto first = run_slices(G, whole, F, cfg, mask, tr, cfg.d1 + 1);
    if (first.ok) {
        tr.event("phase 1 succeeded");
        return detail::finish(G, F.T, std::move(first), std::move(tr));
    }
    tr.event("phase 1 stalled: " + first.failure.reason);
    int cstar = first.stopped_cluster;
    if (cstar < 0) return detail::finish(G, F.T, std::move(first), std::move(tr));

    auto dist = bfs_distances(whole.R, cstar);
    std::vector<int> H, Hp;
    for (int c = 0; c < whole.R.n(); ++c) {
        if (dist[c] >= 0 && dist[c] <= cfg.d1) H.push_back(c);
        if (dist[c] >= 0 && dist[c] <= cfg.d1 + 1) Hp.push_back(c);
    }
    std::vector<char> want(whole.R.n(), 0);
    for (int c : H) {
        int fr = first.free_left[c][0] + first.free_left[c][1] + first.free_left[c][2];
        want[c] = Rational(fr) >= 5 * se * static_cast<std::int64_t>(whole.clusters[c].size());
    }
    std::vector<int> hp_ids;
    for (int c : Hp) hp_ids.push_back(component[c]);
    Graph Rh = induced_subgraph(whole.R, Hp);
    VertexSet all(Rh.n());
    for (int i = 0; i < Rh.n(); ++i) all[i] = i;
    auto bip = bipartition(Rh, all);

    EmbedderConfig cfg2 = cfg;
    cfg2.d = cfg.d2;
    ForestRun second;
    if (!bip) {
        auto M = detail::covering_matching(whole.R, H, want);
        ComponentModel model = sub_model(RG, hp_ids, RouteMode::Matching, scale);
        std::vector<int> pos(whole.R.n(), -1);
        for (std::size_t i = 0; i < Hp.size(); ++i) pos[Hp[i]] = static_cast<int>(i);
        for (auto [a, b] : M) model.M.emplace_back(pos[a], pos[b]);
        tr.event("phase 2: nonbipartite neighbourhood, |M| = " + std::to_string(M.size()));
        require_soft(Rational(2 * static_cast<std::int64_t>(M.size())) >= (1 + 100 * se) * k * scale,
                     "|V(M)| >= (1+100 sqrt(eps)) k |R|/n", cfg, tr);
        second = run_slices(G, model, F, cfg2, mask, tr);
    } else {
        ComponentModel model = sub_model(RG, hp_ids, RouteMode::Sides, scale);
        // side 0 must be the class with the larger intersection with H
        std::vector<char> inH(whole.R.n(), 0);
        for (int c : H) inH[c] = 1;
        int cnt[2] = {0, 0};
        for (std::size_t i = 0; i < Hp.size(); ++i)
            if (inH[Hp[i]]) ++cnt[model.side[i]];
        if (cnt[1] > cnt[0])
            for (auto& s : model.side) s = 1 - s;
        tr.event("phase 2: bipartite neighbourhood, |A cap H| = " + std::to_string(std::max(cnt[0], cnt[1])));
        require_soft(Rational(std::max(cnt[0], cnt[1])) >= (1 + 100 * se) * k * scale,
                     "|A cap H| >= (1+100 sqrt(eps)) k |R|/n", cfg, tr);
        try {
            second = run_slices(G, model, F, cfg2, mask, tr, cfg2.d);
        } catch (const PreconditionError& e) {
            second.failure.stage = "connected";
            second.failure.reason = std::string("phase 2 refused: ") + e.what();
        }
    }
    if (!second.ok) {
        second.failure.stage = "connected";
        second.failure.reason = "phase 1: " + first.failure.reason + "; phase 2: " + second.failure.reason;
    }
    return detail::finish(G, F.T, std::move(second), std::move(tr));
}

}  // namespace treembed
