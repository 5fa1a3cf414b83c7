#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "graph.hpp"
#include "graph_io.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace treembed {

enum class Claim { Embeddable, NotEmbeddable, Unspecified };

inline const char* to_string(Claim c) {
    switch (c) {
        case Claim::Embeddable: return "Embeddable";
        case Claim::NotEmbeddable: return "NotEmbeddable";
        default: return "Unspecified";
    }
}

struct LabeledInstance {
    Graph host;
    std::optional<RootedTree> pattern;
    std::string source;     // example id
    nlohmann::json params;  // regenerates the host exactly
    Claim claim = Claim::Unspecified;
};

inline nlohmann::json provenance(const LabeledInstance& inst) {
    return {{"source", inst.source},
            {"params", inst.params},
            {"claim", to_string(inst.claim)},
            {"host_vertices", inst.host.n()},
            {"host_edges", inst.host.edge_count()},
            {"pattern_vertices", inst.pattern ? inst.pattern->n() : 0}};
}

// Bundle layout: host.edges, pattern.tree (if any), provenance.json.
inline void write_bundle(const LabeledInstance& inst, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "host.edges") << to_edge_list(inst.host);
    if (inst.pattern) std::ofstream(dir / "pattern.tree") << to_parent_array(*inst.pattern) << "\n";
    std::ofstream(dir / "provenance.json") << provenance(inst).dump(2) << "\n";
}

namespace detail {

struct HostBuilder {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    int add(int count) {
        int first = n;
        n += count;
        return first;
    }
    void biclique(int a0, int a, int b0, int b) {
        for (int i = 0; i < a; ++i)
            for (int j = 0; j < b; ++j) edges.emplace_back(a0 + i, b0 + j);
    }
    void clique(int v0, int s) {
        for (int i = 0; i < s; ++i)
            for (int j = i + 1; j < s; ++j) edges.emplace_back(v0 + i, v0 + j);
    }
    void join(int x, int v0, int s) {
        for (int i = 0; i < s; ++i) edges.emplace_back(x, v0 + i);
    }
    Graph build() const { return Graph(n, edges); }
};

inline int exact_int(const Rational& q, const char* what) {
    if (q.denominator() != 1) throw ContractViolation(std::string(what) + " is not an integer");
    return static_cast<int>(q.numerator());
}

// Centre 0 joined to `legs` subtrees produced by `leg(first_vertex, parent_vector)`.
inline RootedTree spider_of(int legs, int leg_size, bool attach_at_leaf) {
    std::vector<int> p{0};
    for (int l = 0; l < legs; ++l) {
        int centre = static_cast<int>(p.size());
        p.push_back(0);
        for (int i = 1; i < leg_size; ++i) p.push_back(centre);
        if (attach_at_leaf && leg_size > 1) {
            // re-hang the star from its first leaf
            p[centre] = centre + 1;
            p[centre + 1] = 0;
        }
    }
    return RootedTree(p);
}

}  // namespace detail

// Two copies of K_{(1-eps)k, (1-eps)k/2} plus an apex on both large sides;
// pattern: centre joined to sqrt(k) stars on sqrt(k) vertices each.
// NotEmbeddable is claimed when k > 1/eps^2 and the stars cannot be split
// between the lobes (see the counting argument in the tests).
inline LabeledInstance gen_spider_host(const Rational& eps, int k) {
    if (eps <= 0 || eps >= 1) throw ContractViolation("gen_spider_host: eps must lie in (0,1)");
    int s = 0;
    while ((s + 1) * (s + 1) <= k) ++s;
    if (k < 1 || s * s != k) throw ContractViolation("gen_spider_host: k must be a perfect square");
    const int a = detail::exact_int((1 - eps) * k, "(1-eps)k");
    const int b = detail::exact_int((1 - eps) * k / 2, "(1-eps)k/2");
    detail::HostBuilder h;
    int apex = h.add(1);
    for (int copy = 0; copy < 2; ++copy) {
        int A = h.add(a), B = h.add(b);
        h.biclique(A, a, B, b);
        h.join(apex, A, a);
    }
    LabeledInstance inst;
    inst.host = h.build();
    inst.pattern = detail::spider_of(s, s, false);
    inst.source = "example1";
    inst.params = {{"eps", to_string(eps)}, {"k", k}};
    // The centre sits in some A (its neighbours are star centres, which need
    // s-1 private leaves). Either all star centres share that lobe's B, or a
    // star centre uses the apex and its s-1 leaves must fit in the other B.
    // Both branches fail when (s-1)^2 > a-1 or s-1 > b, on top of the
    // total-capacity bound k > 1/eps^2.
    bool capacity = Rational(k) * eps * eps > 1;
    bool stuck = (s - 1) * (s - 1) > a - 1 || s - 1 > b;
    inst.claim = capacity && stuck ? Claim::NotEmbeddable : Claim::Unspecified;
    return inst;
}

// Tree: root with delta+1 children, odd-level vertices with delta children,
// positive even levels with at most one child, grown breadth first inside
// each root branch until the tree has k+1 vertices. Host: two copies of K_{|A|,|B|} with
// |A| = (delta/(delta+1))^2 k and |B| = delta k / (2(delta+1)), apex on both A.
inline LabeledInstance gen_delta_example(int delta, int k) {
    if (delta < 2) throw ContractViolation("gen_delta_example: delta >= 2 required");
    if (k <= 0 || k % (delta + 1) != 0) throw ContractViolation("gen_delta_example: (delta+1) must divide k");
    const int odd = k / (delta + 1);
    if (odd < delta + 1) throw ContractViolation("gen_delta_example: k >= (delta+1)^2 required");
    const int a = detail::exact_int(Rational(delta * delta, (delta + 1) * (delta + 1)) * k, "|A|");
    const int b = detail::exact_int(Rational(delta, 2 * (delta + 1)) * k, "|B|");

    // Extensions cycle over the delta+1 root branches so that all branches
    // stay equal; (delta+1) | odd makes this exact. A lopsided fill lets an
    // odd vertex at the apex split the tree evenly between the two lobes.
    std::vector<int> p{0};
    std::vector<std::vector<int>> frontier(delta + 1);  // per branch, even vertices that may take a child
    std::vector<std::size_t> next(delta + 1, 0);
    auto add_odd = [&](int parent, int branch) {
        int o = static_cast<int>(p.size());
        p.push_back(parent);
        for (int i = 0; i < delta; ++i) {
            frontier[branch].push_back(static_cast<int>(p.size()));
            p.push_back(o);
        }
    };
    for (int i = 0; i <= delta; ++i) add_odd(0, i);
    for (int e = 0; e < odd - (delta + 1); ++e) {
        int branch = e % (delta + 1);
        add_odd(frontier[branch][next[branch]++], branch);
    }

    detail::HostBuilder h;
    int apex = h.add(1);
    for (int copy = 0; copy < 2; ++copy) {
        int A = h.add(a), B = h.add(b);
        h.biclique(A, a, B, b);
        h.join(apex, A, a);
    }
    LabeledInstance inst;
    inst.host = h.build();
    inst.pattern = RootedTree(p);
    inst.source = "exampleDelta";
    inst.params = {{"delta", delta}, {"k", k}};
    // With the root on the apex the delta+1 equal branches must share the two
    // B sides, each holding exactly (delta+1)/2 branches' worth; only an odd
    // branch count forces an overflow.
    inst.claim = delta % 2 == 0 ? Claim::NotEmbeddable : Claim::Unspecified;
    return inst;
}

// Hosts (a) K_{2k/3-2,2k/3-2} + universal vertex, (b) 2 K_{2k/3-1} + universal
// vertex, (c) two lobes K_{a_size,b_size} with the apex on both A sides,
// (d) as (c) with the second lobe replaced by K_{2k/3-1} joined fully to the
// apex. Patterns: three stars of order k/3 joined at their centres (T), the
// same stars joined at a leaf each (T'), and three paths of order k/3.
inline std::vector<LabeledInstance> gen_two_thirds_hosts(int k, std::optional<int> a_size = {},
                                                         std::optional<int> b_size = {}) {
    if (k % 3 != 0 || k < 6) throw ContractViolation("gen_two_thirds_hosts: k must be a multiple of 3, k >= 6");
    const int q = 2 * k / 3;
    const int a = a_size.value_or(q - 2), b = b_size.value_or(q - 3);
    if (a < 1 || b < 1) throw ContractViolation("gen_two_thirds_hosts: lobe sides must be positive");
    const bool default_sizes = a <= q - 2 && b <= q - 3;
    RootedTree T = detail::spider_of(3, k / 3, false);
    RootedTree Tleaf = detail::spider_of(3, k / 3, true);
    RootedTree paths = [&] {
        std::vector<int> p{0};
        for (int l = 0; l < 3; ++l)
            for (int i = 0; i < k / 3; ++i) p.push_back(i == 0 ? 0 : static_cast<int>(p.size()) - 1);
        return RootedTree(p);
    }();

    std::vector<LabeledInstance> out;
    auto emit = [&](const Graph& G, const std::string& host, const RootedTree& P, const std::string& pat, Claim c) {
        LabeledInstance inst;
        inst.host = G;
        inst.pattern = P;
        inst.source = "example:2/3";
        inst.params = {{"k", k}, {"host", host}, {"pattern", pat}, {"a_size", a}, {"b_size", b}};
        inst.claim = c;
        out.push_back(std::move(inst));
    };

    detail::HostBuilder ha;
    int ua = ha.add(1), A = ha.add(q - 2), B = ha.add(q - 2);
    ha.biclique(A, q - 2, B, q - 2);
    ha.join(ua, A, 2 * (q - 2));
    Graph Ga = ha.build();

    detail::HostBuilder hb;
    int ub = hb.add(1), K1 = hb.add(q - 1), K2 = hb.add(q - 1);
    hb.clique(K1, q - 1);
    hb.clique(K2, q - 1);
    hb.join(ub, K1, 2 * (q - 1));
    Graph Gb = hb.build();

    detail::HostBuilder hc;
    int xc = hc.add(1);
    for (int copy = 0; copy < 2; ++copy) {
        int A_ = hc.add(a), B_ = hc.add(b);
        hc.biclique(A_, a, B_, b);
        hc.join(xc, A_, a);
    }
    Graph Gc = hc.build();

    detail::HostBuilder hd;
    int xd = hd.add(1), A1 = hd.add(a), B1 = hd.add(b), K = hd.add(q - 1);
    hd.biclique(A1, a, B1, b);
    hd.clique(K, q - 1);
    hd.join(xd, A1, a);
    hd.join(xd, K, q - 1);
    Graph Gd = hd.build();

    const Claim lobes = default_sizes ? Claim::NotEmbeddable : Claim::Unspecified;
    const Claim lobes_leaf = a <= q - 3 ? Claim::NotEmbeddable : Claim::Unspecified;
    emit(Ga, "a", T, "stars-at-centres", Claim::NotEmbeddable);
    emit(Gb, "b", T, "stars-at-centres", Claim::NotEmbeddable);
    emit(Gb, "b", paths, "paths", Claim::NotEmbeddable);
    emit(Gc, "c", T, "stars-at-centres", lobes);
    emit(Gc, "c", Tleaf, "stars-at-leaves", lobes_leaf);
    emit(Gd, "d", T, "stars-at-centres", lobes);
    emit(Gd, "d", Tleaf, "stars-at-leaves", lobes_leaf);
    return out;
}

// (1) floor(n/k) disjoint K_k plus a clique on the remainder; (2) disjoint
// copies of K_{k-1,k-1}; (3) K_n with all edges inside A removed,
// |A| = n - floor(k/2) + 1. Patterns: path for (1) and (3), star K_{1,k} for (2).
inline std::vector<LabeledInstance> gen_erdos_sos_extremal(int n, int k) {
    if (k < 2 || n < k) throw ContractViolation("gen_erdos_sos_extremal: 2 <= k <= n required");
    std::vector<LabeledInstance> out;
    auto make = [&](int family, Graph G, RootedTree P, const std::string& pat, Claim c) {
        LabeledInstance inst;
        inst.host = std::move(G);
        inst.pattern = std::move(P);
        inst.source = "erdos-sos-extremal";
        inst.params = {{"family", family}, {"n", n}, {"k", k}, {"pattern", pat}};
        inst.claim = c;
        out.push_back(std::move(inst));
    };
    {
        detail::HostBuilder h;
        for (int i = 0; i < n / k; ++i) h.clique(h.add(k), k);
        if (n % k) h.clique(h.add(n % k), n % k);
        make(1, h.build(), make_path(k + 1), "path", Claim::NotEmbeddable);
    }
    {
        detail::HostBuilder h;
        int copies = std::max(1, n / (2 * (k - 1)));
        for (int i = 0; i < copies; ++i) {
            int A = h.add(k - 1), B = h.add(k - 1);
            h.biclique(A, k - 1, B, k - 1);
        }
        make(2, h.build(), make_star(k + 1), "star", Claim::NotEmbeddable);
    }
    {
        const int small = k / 2 - 1;  // n - |A|
        if (small >= 1) {
            detail::HostBuilder h;
            int Bv = h.add(small), Av = h.add(n - small);
            h.clique(Bv, small);
            h.biclique(Bv, small, Av, n - small);
            // a path alternates into the independent set A, so it has at most 2|B|+1 < k+1 vertices
            make(3, h.build(), make_path(k + 1), "path", Claim::NotEmbeddable);
        }
    }
    return out;
}

// Uniform labelled tree (Pruefer sequence) conditioned on max degree <= cap,
// by rejection; random attachment if rejection keeps failing.
inline RootedTree random_tree(int n, int cap, Rng& rng) {
    if (n < 1 || (n > 2 && cap < 2)) throw ContractViolation("random_tree: need n >= 1 and cap >= 2");
    if (n <= 2) return make_path(n);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<int> seq(n - 2), deg(n, 1);
        for (int& x : seq) ++deg[x = static_cast<int>(rng.below(n))];
        if (*std::max_element(deg.begin(), deg.end()) > cap) continue;
        std::vector<std::pair<int, int>> e;
        std::set<int> leaves;
        for (int v = 0; v < n; ++v)
            if (deg[v] == 1) leaves.insert(v);
        for (int x : seq) {
            int leaf = *leaves.begin();
            leaves.erase(leaves.begin());
            e.emplace_back(leaf, x);
            if (--deg[x] == 1) leaves.insert(x);
        }
        e.emplace_back(*leaves.begin(), *std::next(leaves.begin()));
        return RootedTree::from_edges(n, e, 0);
    }
    std::vector<int> p(n, 0), deg(n, 0);
    for (int v = 1; v < n; ++v) {
        int u;
        do u = static_cast<int>(rng.below(v));
        while (deg[u] + (u != 0) >= cap);
        p[v] = u;
        ++deg[u];
    }
    return RootedTree(p);
}

// Apex 0 joined to maxDegTarget random vertices; the rest split into lobes
// that alternate between random bipartite graphs and random dense blobs;
// a repair pass (never touching the apex) lifts every degree to minDeg.
inline Graph random_host_with_degrees(int n, int min_deg, int max_deg_target, std::uint64_t seed) {
    if (n < 2 || min_deg < 0 || min_deg >= n || max_deg_target < 0 || max_deg_target >= n)
        throw ContractViolation("random_host_with_degrees: need 0 <= minDeg < n and maxDegTarget < n");
    if (min_deg > n - 2 && max_deg_target < n - 1)
        throw ContractViolation("random_host_with_degrees: minDeg needs the apex to be universal");
    Rng rng(seed);
    const int rest = n - 1;
    const int lobe_target = std::max(3 * (min_deg + 1), 4);
    const int lobes = std::max(1, rest / lobe_target);
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    auto link = [&](int u, int v) { adj[u][v] = adj[v][u] = 1; };
    std::vector<int> lobe_of(n, -1), part(n, 0);
    std::vector<std::vector<int>> members(lobes);
    for (int i = 0; i < rest; ++i) {
        int v = 1 + i, l = i * lobes / rest;
        lobe_of[v] = l;
        members[l].push_back(v);
    }
    for (int l = 0; l < lobes; ++l) {
        const auto& mem = members[l];
        const int s = static_cast<int>(mem.size());
        const bool bip = l % 2 == 0 && s / 2 > min_deg;
        if (bip) {
            int half = s / 2;
            for (int i = half; i < s; ++i) part[mem[i]] = 1;
            std::uint64_t den = static_cast<std::uint64_t>(half), num = std::min<std::uint64_t>(den, (5 * min_deg + 3) / 4);
            for (int i = 0; i < half; ++i)
                for (int j = half; j < s; ++j)
                    if (rng.chance(num, den)) link(mem[i], mem[j]);
        } else {
            std::uint64_t den = static_cast<std::uint64_t>(std::max(1, s - 1));
            std::uint64_t num = std::min<std::uint64_t>(den, (5 * min_deg + 3) / 4);
            for (int i = 0; i < s; ++i)
                for (int j = i + 1; j < s; ++j)
                    if (rng.chance(num, den)) link(mem[i], mem[j]);
            for (int v : mem) part[v] = -1;
        }
    }
    std::vector<int> others(rest);
    for (int i = 0; i < rest; ++i) others[i] = i + 1;
    rng.shuffle(others);
    for (int i = 0; i < max_deg_target; ++i) link(0, others[i]);

    auto degree = [&](int v) {
        int d = 0;
        for (int w = 0; w < n; ++w) d += adj[v][w];
        return d;
    };
    for (int v = 1; v < n; ++v) {
        int d = degree(v);
        if (d >= min_deg) continue;
        // same lobe first (opposite side when bipartite), then anywhere
        for (int pass = 0; pass < 2 && d < min_deg; ++pass) {
            std::vector<int> pool;
            for (int w = 1; w < n; ++w) {
                if (w == v || adj[v][w]) continue;
                bool local = lobe_of[w] == lobe_of[v] && (part[v] < 0 || part[w] != part[v]);
                if (pass == 0 ? local : !local) pool.push_back(w);
            }
            rng.shuffle(pool);
            for (std::size_t i = 0; i < pool.size() && d < min_deg; ++i, ++d) link(v, pool[i]);
        }
    }
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (adj[u][v]) e.emplace_back(u, v);
    return Graph(n, e);
}

}  // namespace treembed
