#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "graph_enum.hpp"
#include "graph_io.hpp"
#include "oracle.hpp"
#include "tree_enum.hpp"

namespace treembed {

enum class Conjecture { ErdosSos, TwoKHalf, TwoThirds, ConstDelta, Ell };

inline Conjecture parse_conjecture(const std::string& s) {
    if (s == "erdos-sos") return Conjecture::ErdosSos;
    if (s == "two-k-half") return Conjecture::TwoKHalf;
    if (s == "two-thirds") return Conjecture::TwoThirds;
    if (s == "const-delta") return Conjecture::ConstDelta;
    if (s == "ell") return Conjecture::Ell;
    throw ContractViolation("unknown conjecture '" + s + "'");
}

inline const char* to_string(Conjecture c) {
    switch (c) {
        case Conjecture::ErdosSos: return "erdos-sos";
        case Conjecture::TwoKHalf: return "two-k-half";
        case Conjecture::TwoThirds: return "two-thirds";
        case Conjecture::ConstDelta: return "const-delta";
        default: return "ell";
    }
}

// Degree bounds of a conjecture are multiplied by (1 - weaken) when set,
// which turns the sweep into a search for counterexamples to the weaker claim.
struct SweepParams {
    Conjecture conj = Conjecture::TwoKHalf;
    int kmin = 1, kmax = 6;
    int Delta = 3;             // const-delta
    Rational alpha{1, 4};      // ell
    std::optional<Rational> weaken;
    int max_tree_degree = 0;   // 0 = no filter
    std::uint64_t budget = kDefaultOracleBudget;
    int jobs = 1;
};

struct HostCase {
    std::string name;
    Graph G;
    std::optional<RootedTree> pattern;  // when set, the only tree tested on this host
};

enum class Outcome { Embedded, NotEmbeddable, HypothesisNotMet, BudgetExceeded };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Embedded: return "Embedded";
        case Outcome::NotEmbeddable: return "NotEmbeddable";
        case Outcome::HypothesisNotMet: return "HypothesisNotMet";
        default: return "BudgetExceeded";
    }
}

struct TreeRun {
    std::string tree;  // parent array
    OracleStatus status = OracleStatus::NotFound;
    std::vector<int> witness;
    std::uint64_t nodes = 0;
};

struct GridPoint {
    int index = 0;
    int k = 0;
    int host = 0;
    Outcome outcome = Outcome::HypothesisNotMet;
    std::string hypothesis;  // the degree values checked
    std::vector<TreeRun> trees;
};

struct Counterexample {
    int grid = 0;
    int k = 0;
    int host = 0;
    std::string tree;
    std::string hypothesis;
};

struct SweepReport {
    SweepParams params;
    std::vector<std::string> host_names;
    std::vector<Graph> hosts;
    std::vector<GridPoint> points;
    std::vector<Counterexample> counterexamples;

    std::map<std::string, int> totals() const {
        std::map<std::string, int> t{{"Embedded", 0}, {"NotEmbeddable", 0}, {"HypothesisNotMet", 0}, {"BudgetExceeded", 0}};
        for (const auto& p : points) ++t[to_string(p.outcome)];
        return t;
    }
};

// Returns whether the hypothesis holds and a description of the values.
inline std::pair<bool, std::string> conjecture_hypothesis(const SweepParams& s, const Graph& G, int k) {
    const auto ds = degree_stats(G);
    const Rational w = s.weaken ? 1 - *s.weaken : Rational(1);
    const Rational mn(ds.min), mx(ds.max);
    bool ok = false;
    switch (s.conj) {
        case Conjecture::ErdosSos: ok = ds.average > w * (k - 1); break;
        case Conjecture::TwoKHalf: ok = mn >= w * Rational(k, 2) && mx >= w * 2 * k; break;
        case Conjecture::TwoThirds: ok = mn >= w * ((2 * k) / 3) && mx >= w * k; break;
        case Conjecture::ConstDelta:
            ok = mn >= w * Rational(k, 2) && mx >= w * 2 * (1 - Rational(1, s.Delta)) * k;
            break;
        case Conjecture::Ell:
            ok = mn >= w * (1 + s.alpha) * Rational(k, 2) && mx >= w * 2 * (1 - s.alpha) * k;
            break;
    }
    std::string desc = "n=" + std::to_string(G.n()) + " delta=" + std::to_string(ds.min) +
                       " Delta=" + std::to_string(ds.max) + " d=" + to_string(ds.average);
    return {ok, desc};
}

namespace detail {

inline int tree_degree_cap(const SweepParams& s) {
    int cap = s.max_tree_degree;
    if (s.conj == Conjecture::ConstDelta) cap = cap > 0 ? std::min(cap, s.Delta) : s.Delta;
    return cap;
}

inline GridPoint run_point(const SweepParams& s, const HostCase& h, int k, const std::vector<RootedTree>& trees) {
    GridPoint p;
    p.k = k;
    auto [ok, desc] = conjecture_hypothesis(s, h.G, k);
    p.hypothesis = desc;
    if (!ok) return p;
    bool refuted = false, exceeded = false;
    for (const auto& T : trees) {
        TreeRun r;
        r.tree = to_parent_array(T);
        auto res = embeds(T, h.G, s.budget);
        r.status = res.status;
        r.nodes = res.nodes;
        if (res.status == OracleStatus::Found) {
            if (!verify_embedding(T, h.G, res.witness.map)) throw InvariantViolation("sweep: witness fails verification");
            r.witness = res.witness.map;
        }
        refuted |= res.status == OracleStatus::NotFound;
        exceeded |= res.status == OracleStatus::BudgetExceeded;
        p.trees.push_back(std::move(r));
    }
    p.outcome = refuted ? Outcome::NotEmbeddable : exceeded ? Outcome::BudgetExceeded : Outcome::Embedded;
    return p;
}

}  // namespace detail

// Grid = every k in [kmin, kmax] times every host, in that order (hosts with
// a fixed pattern only contribute the point at the pattern's k). A grid point
// is NotEmbeddable if some tested tree is refuted by exhausted search.
inline SweepReport sweep_conjecture(const SweepParams& params, const std::vector<HostCase>& hosts) {
    if (params.kmin < 1 || params.kmax < params.kmin) throw ContractViolation("sweep: need 1 <= kmin <= kmax");
    if (params.conj == Conjecture::ConstDelta && params.Delta < 2) throw ContractViolation("sweep: const-delta needs Delta >= 2");
    SweepReport rep;
    rep.params = params;
    for (const auto& h : hosts) rep.host_names.push_back(h.name), rep.hosts.push_back(h.G);

    const int cap = detail::tree_degree_cap(params);
    std::map<int, std::vector<RootedTree>> trees;
    const bool need_all = std::any_of(hosts.begin(), hosts.end(), [](const HostCase& h) { return !h.pattern; });
    for (int k = params.kmin; need_all && k <= params.kmax; ++k) {
        auto& list = trees[k];
        for (auto& T : all_trees(k + 1))
            if (cap == 0 || T.max_degree() <= cap) list.push_back(std::move(T));
    }
    struct Task {
        int k, host;
    };
    std::vector<Task> tasks;
    for (int k = params.kmin; k <= params.kmax; ++k)
        for (int h = 0; h < static_cast<int>(hosts.size()); ++h)
            if (!hosts[h].pattern || hosts[h].pattern->t() == k) tasks.push_back({k, h});
    for (int h = 0; h < static_cast<int>(hosts.size()); ++h)
        if (hosts[h].pattern && (hosts[h].pattern->t() < params.kmin || hosts[h].pattern->t() > params.kmax))
            tasks.push_back({hosts[h].pattern->t(), h});

    rep.points.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            const auto& t = tasks[i];
            const auto& h = hosts[t.host];
            std::vector<RootedTree> own;
            if (h.pattern) own.push_back(*h.pattern);
            auto p = detail::run_point(params, h, t.k, h.pattern ? own : trees.at(t.k));
            p.index = static_cast<int>(i);
            p.host = t.host;
            rep.points[i] = std::move(p);
        }
    };
    const int jobs = std::max(1, params.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& p : rep.points)
        for (const auto& r : p.trees)
            if (r.status == OracleStatus::NotFound) rep.counterexamples.push_back({p.index, p.k, p.host, r.tree, p.hypothesis});
    auto tot = rep.totals();
    int sum = 0;
    for (auto& [_, v] : tot) sum += v;
    if (sum != static_cast<int>(rep.points.size())) throw InvariantViolation("sweep: totals do not add up to the grid size");
    return rep;
}

inline nlohmann::json to_json(const SweepReport& r, bool witnesses = true) {
    nlohmann::json params{{"conjecture", to_string(r.params.conj)},
                          {"kmin", r.params.kmin},
                          {"kmax", r.params.kmax},
                          {"max_tree_degree", r.params.max_tree_degree},
                          {"budget", r.params.budget}};
    if (r.params.conj == Conjecture::ConstDelta) params["Delta"] = r.params.Delta;
    if (r.params.conj == Conjecture::Ell) params["alpha"] = to_string(r.params.alpha);
    if (r.params.weaken) params["weaken"] = to_string(*r.params.weaken);
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : r.points) {
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& t : p.trees) {
            nlohmann::json jt{{"tree", t.tree}, {"status", to_string(t.status)}, {"nodes", t.nodes}};
            if (witnesses && t.status == OracleStatus::Found) jt["witness"] = to_json(Embedding{t.witness});
            trees.push_back(jt);
        }
        points.push_back({{"index", p.index},
                          {"k", p.k},
                          {"host", r.host_names[p.host]},
                          {"outcome", to_string(p.outcome)},
                          {"hypothesis", p.hypothesis},
                          {"trees", trees}});
    }
    nlohmann::json cex = nlohmann::json::array();
    for (const auto& c : r.counterexamples)
        cex.push_back({{"grid", c.grid}, {"k", c.k}, {"host", r.host_names[c.host]}, {"tree", c.tree},
                       {"hypothesis", c.hypothesis}});
    return {{"schema", "sweep-report/1"},
            {"parameters", params},
            {"grid_size", r.points.size()},
            {"totals", r.totals()},
            {"points", points},
            {"counterexamples", cex}};
}

inline std::string to_csv(const SweepReport& r) {
    std::ostringstream out;
    out << "index,k,host,outcome,trees,embedded,not_embeddable,budget_exceeded,hypothesis\n";
    for (const auto& p : r.points) {
        int e = 0, ne = 0, be = 0;
        for (const auto& t : p.trees) {
            e += t.status == OracleStatus::Found;
            ne += t.status == OracleStatus::NotFound;
            be += t.status == OracleStatus::BudgetExceeded;
        }
        out << p.index << ',' << p.k << ',' << r.host_names[p.host] << ',' << to_string(p.outcome) << ','
            << p.trees.size() << ',' << e << ',' << ne << ',' << be << ",\"" << p.hypothesis << "\"\n";
    }
    return out.str();
}

// cex_<i>/host.edges and cex_<i>/pattern.tree for replay with `oracle`.
inline void write_counterexamples(const SweepReport& r, const std::filesystem::path& dir) {
    for (std::size_t i = 0; i < r.counterexamples.size(); ++i) {
        const auto& c = r.counterexamples[i];
        auto sub = dir / ("cex_" + std::to_string(i));
        std::filesystem::create_directories(sub);
        std::ofstream(sub / "host.edges") << to_edge_list(r.hosts[c.host]);
        std::ofstream(sub / "pattern.tree") << c.tree << "\n";
        std::ofstream(sub / "info.json") << nlohmann::json{{"grid", c.grid},
                                                           {"k", c.k},
                                                           {"host", r.host_names[c.host]},
                                                           {"hypothesis", c.hypothesis}}
                                                .dump(2)
                                         << "\n";
    }
}

// ---- host batteries ----

namespace detail {

inline Graph two_bicliques_with_apex(int a, int b) {
    std::vector<std::pair<int, int>> e;
    const int apex = 2 * (a + b);
    for (int c = 0; c < 2; ++c) {
        int A = c * (a + b), B = A + a;
        for (int i = 0; i < a; ++i) {
            e.emplace_back(apex, A + i);
            for (int j = 0; j < b; ++j) e.emplace_back(A + i, B + j);
        }
    }
    return Graph(apex + 1, e);
}

inline Graph complete_bipartite(int a, int b) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) e.emplace_back(i, a + j);
    return Graph(a + b, e);
}

// Disjoint cliques K_s and an apex joined to `reach` of their vertices.
inline Graph cliques_with_apex(int s, int reach) {
    const int copies = (reach + s - 1) / s;
    const int apex = copies * s;
    std::vector<std::pair<int, int>> e;
    for (int c = 0; c < copies; ++c)
        for (int i = 0; i < s; ++i)
            for (int j = i + 1; j < s; ++j) e.emplace_back(c * s + i, c * s + j);
    for (int v = 0; v < reach; ++v) e.emplace_back(apex, v);
    return Graph(apex + 1, e);
}

}  // namespace detail

// Hosts sitting on the two-k-half thresholds for each k <= kmax: the
// eps = 0 version of the two-biclique construction, K_{ceil(k/2), 2k}, and
// cliques of size ceil(k/2)+1 under an apex of degree 2k.
inline std::vector<HostCase> extremal_adjacent_hosts(int kmax) {
    std::vector<HostCase> out;
    for (int k = 1; k <= kmax; ++k) {
        const int h = (k + 1) / 2;
        out.push_back({"bicliques_apex_k" + std::to_string(k), detail::two_bicliques_with_apex(k, h), std::nullopt});
        out.push_back({"K_" + std::to_string(h) + "_" + std::to_string(2 * k), detail::complete_bipartite(h, 2 * k),
                       std::nullopt});
        out.push_back({"cliques_apex_k" + std::to_string(k), detail::cliques_with_apex(h + 1, 2 * k), std::nullopt});
    }
    return out;
}

// `count` seeded hosts with minimum degree >= min_deg and an apex of degree
// max_deg; the order n is drawn from [max_deg + 1, max_deg + 8].
inline std::vector<HostCase> random_degree_hosts(int count, int min_deg, int max_deg, std::uint64_t seed) {
    std::vector<HostCase> out;
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        int n = rng.range(max_deg + 1, max_deg + 8);
        std::uint64_t s = rng.next();
        Graph G = random_host_with_degrees(n, min_deg, max_deg, s);
        out.push_back({"random_" + std::to_string(i), std::move(G), std::nullopt});
    }
    return out;
}

inline std::vector<HostCase> all_small_graphs(int nmax) {
    std::vector<HostCase> out;
    for (int n = 1; n <= nmax; ++n) {
        auto gs = enumerate_graphs(n);
        for (std::size_t i = 0; i < gs.size(); ++i)
            out.push_back({"g" + std::to_string(n) + "_" + to_graph6(gs[i]), std::move(gs[i]), std::nullopt});
    }
    return out;
}

// Two-biclique spider hosts with their spider patterns.
inline std::vector<HostCase> example1_hosts() {
    std::vector<HostCase> out;
    for (auto [eps, k] : {std::pair{Rational(1, 3), 36}, std::pair{Rational(1, 4), 16}}) {
        auto inst = gen_spider_host(eps, k);
        out.push_back({"example1_eps" + std::to_string(eps.numerator()) + "_" + std::to_string(eps.denominator()) +
                           "_k" + std::to_string(k),
                       inst.host, inst.pattern});
    }
    return out;
}

}  // namespace treembed
