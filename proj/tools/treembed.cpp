// Exit codes: 0 success or claim confirmed, 1 claim refuted or counterexample
// found, 2 usage or refused input, 3 oracle budget exhausted.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "treembed/cut_coloring.hpp"
#include "treembed/generators.hpp"
#include "treembed/graph_io.hpp"
#include "treembed/matching.hpp"
#include "treembed/pipeline.hpp"
#include "treembed/regularity.hpp"
#include "treembed/sweep.hpp"
#include "treembed/tree_cut.hpp"

using namespace treembed;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kRefuted = 1, kUsage = 2, kBudget = 3;

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Usage("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Graph load_graph(const std::string& path, const std::string& format) {
    bool g6 = format == "graph6" || (format == "auto" && fs::path(path).extension() == ".g6");
    return parse_graph(slurp(path), g6 ? GraphFormat::Graph6 : GraphFormat::EdgeList);
}

RootedTree load_tree(const std::string& path) { return parse_tree(slurp(path)); }

VertexSet parse_list(const std::string& s) {
    VertexSet out;
    std::stringstream in(s);
    for (std::string tok; std::getline(in, tok, ',');) {
        if (tok.empty()) continue;
        std::size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size() || v < 0) throw Usage("bad vertex '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    std::ofstream(out, std::ios::binary) << text;
}

void emit(const json& j, const std::string& out) { emit(j.dump(2) + "\n", out); }

json coloring_json(const CutColoring& c) {
    return {{"z", c.z}, {"color", c.color}, {"c0", c.c0}, {"c1", c.c1}, {"sigma", c.sigma}};
}

json edges_json(const Graph& G) {
    json e = json::array();
    for (auto [u, v] : G.edges()) e.push_back({u, v});
    return e;
}

void log_trace(const Trace& t, int verbosity) {
    if (verbosity < 1) return;
    for (const auto& w : t.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& e : t.events) std::cerr << "event: " << e << "\n";
    if (verbosity >= 2)
        for (const auto& b : t.balance) std::cerr << "balance: " << b.dump() << "\n";
    std::cerr << "min candidates: " << (t.min_candidates == INT_MAX ? -1 : t.min_candidates)
              << ", atypical placements: " << t.atypical << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"treembed: tree embedding under degree conditions, with an exact oracle and sweeps"};
    app.require_subcommand(1);
    app.fallthrough();
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Instrumentation logs on stderr (repeat for more)");

    std::string out, graph_path, tree_path, graph_format = "auto";
    auto add_graph = [&](CLI::App* s, bool required) {
        auto o = s->add_option("--graph", graph_path, "Host graph file (edge list, or graph6 with .g6)");
        if (required) o->required();
        s->add_option("--graph-format", graph_format, "auto | edge-list | graph6")
            ->check(CLI::IsMember({"auto", "edge-list", "graph6"}));
    };
    auto add_out = [&](CLI::App* s) { s->add_option("-o,--out", out, "Output file (default stdout)"); };

    // decompose
    auto* dec = app.add_subcommand("decompose", "Seeds and pieces of a tree for a piece fraction beta");
    std::string beta_s = "1/3";
    dec->add_option("--tree", tree_path, "Tree in parent-array format")->required();
    dec->add_option("--beta", beta_s, "Piece fraction, p/q");
    add_out(dec);

    // color
    auto* col = app.add_subcommand("color", "Cut vertex colourings of a tree, both procedures");
    col->add_option("--tree", tree_path)->required();
    add_out(col);

    // separator
    auto* sep = app.add_subcommand("separator", "Half separator seen from a leaf");
    int leaf = -1;
    sep->add_option("--tree", tree_path)->required();
    sep->add_option("--leaf", leaf, "Leaf to root at (default: smallest leaf)");
    add_out(sep);

    // regcheck
    auto* reg = app.add_subcommand("regcheck", "Check whether (A, B) is an eps-regular pair");
    std::string a_s, b_s, eps_s = "1/10", mode_s = "exhaustive";
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    add_graph(reg, true);
    reg->add_option("--A", a_s, "Comma separated vertices")->required();
    reg->add_option("--B", b_s, "Comma separated vertices")->required();
    reg->add_option("--eps", eps_s, "p/q");
    reg->add_option("--mode", mode_s)->check(CLI::IsMember({"exhaustive", "sampled"}));
    reg->add_option("--samples", samples);
    reg->add_option("--seed", seed);
    add_out(reg);

    // reduce
    auto* red = app.add_subcommand("reduce", "Reduced graph of a cluster partition");
    std::string partition_path, eta_s = "1/20", alpha_s;
    int cluster_size = 0;
    add_graph(red, true);
    red->add_option("--partition", partition_path, "Partition JSON with a 'clusters' array");
    red->add_option("--cluster-size", cluster_size, "Build a heuristic partition with this cluster size");
    red->add_option("--seed", seed);
    red->add_option("--eps", eps_s);
    red->add_option("--eta", eta_s);
    red->add_option("--alpha", alpha_s, "Also report the minimum degree transfer for this alpha");
    add_out(red);

    // matchdec
    auto* mat = app.add_subcommand("matchdec", "Independent set / matching / triangle decomposition");
    int refine_t = 0;
    add_graph(mat, true);
    mat->add_option("--partition", partition_path, "With a host graph: refine this partition along a matching");
    mat->add_option("--t", refine_t, "Tree size for the refinement");
    add_out(mat);

    // embed
    auto* emb = app.add_subcommand("embed", "Embed a tree via the degree-condition pipelines");
    std::string mode = "two-k-half", delta_s = "1/10", beta_opt;
    int max_tree_degree = 0;
    bool force = false;
    std::string eps_embed = "1/10000";
    add_graph(emb, true);
    emb->add_option("--tree", tree_path)->required();
    emb->add_option("--mode", mode)->check(
        CLI::IsMember({"two-k-half", "two-thirds", "bounded-delta", "erdos-sos", "second-nbhd"}));
    emb->add_option("--Delta", max_tree_degree, "Tree degree bound for bounded-delta");
    emb->add_flag("--force", force, "Turn refusals of asymptotic hypotheses into warnings");
    emb->add_option("--eps", eps_embed);
    emb->add_option("--delta", delta_s);
    emb->add_option("--beta", beta_opt);
    emb->add_option("--cluster-size", cluster_size);
    emb->add_option("--seed", seed);
    add_out(emb);

    // oracle
    auto* orc = app.add_subcommand("oracle", "Exact embedding search");
    std::uint64_t budget = kDefaultOracleBudget;
    add_graph(orc, true);
    orc->add_option("--tree", tree_path)->required();
    orc->add_option("--budget", budget, "Search node limit");
    add_out(orc);

    // sweep
    auto* swp = app.add_subcommand("sweep", "Check a conjecture on every small tree over a host battery");
    std::string conj = "two-k-half", weaken_s, battery = "default", format = "csv", cex_dir = "counterexamples";
    int kmin = 1, kmax = 6, jobs = 1, random_count = 500, nmax = 8, Delta = 3, tree_cap = 0;
    std::string ell_alpha = "1/4";
    swp->add_option("--conj", conj)->check(
        CLI::IsMember({"erdos-sos", "two-k-half", "two-thirds", "const-delta", "ell"}));
    swp->add_option("--kmin", kmin);
    swp->add_option("--kmax", kmax);
    swp->add_option("--Delta", Delta, "const-delta parameter");
    swp->add_option("--alpha", ell_alpha, "ell parameter, p/q");
    swp->add_option("--weaken", weaken_s, "Multiply every degree bound by 1 - weaken");
    swp->add_option("--max-tree-degree", tree_cap);
    swp->add_option("--hosts", battery, "default | extremal | random | small | example1")
        ->check(CLI::IsMember({"default", "extremal", "random", "small", "example1"}));
    swp->add_option("--random-count", random_count);
    swp->add_option("--nmax", nmax, "Largest order for the 'small' battery");
    swp->add_option("--seed", seed);
    swp->add_option("--budget", budget);
    swp->add_option("--jobs", jobs);
    swp->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    swp->add_option("--cex-dir", cex_dir, "Where counterexamples are dumped");
    add_out(swp);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate extremal instances as bundles");
    std::string example;
    int k = 0, n = 0, delta_int = 2, min_deg = 0, max_deg = 0;
    std::optional<int> a_size, b_size;
    std::string gen_eps = "1/3", gen_dir = "instances";
    bool verify = false;
    gen->add_option("example", example, "example1 | delta | two-thirds | erdos-sos | random")
        ->required()
        ->check(CLI::IsMember({"example1", "delta", "two-thirds", "erdos-sos", "random"}));
    gen->add_option("--eps", gen_eps);
    gen->add_option("--k", k);
    gen->add_option("--n", n);
    gen->add_option("--Delta", delta_int);
    gen->add_option("--a-size", a_size);
    gen->add_option("--b-size", b_size);
    gen->add_option("--min-deg", min_deg);
    gen->add_option("--max-deg", max_deg);
    gen->add_option("--seed", seed);
    gen->add_option("--dir", gen_dir, "Bundle directory");
    gen->add_flag("--verify", verify, "Check the claimed outcome with the oracle");
    gen->add_option("--budget", budget);
    add_out(gen);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*dec) {
            auto T = load_tree(tree_path);
            auto D = decompose_pieces(T, parse_rational(beta_s));
            json pieces = json::array();
            for (const auto& p : D.pieces)
                pieces.push_back({{"root", p.root}, {"attached_to", p.attached_to}, {"vertices", p.vertices}});
            emit(json{{"schema", "decomposition/1"},
                      {"t", T.t()},
                      {"beta", beta_s},
                      {"seeds", D.seeds},
                      {"pieces", pieces},
                      {"order", D.order}},
                 out);
            return kOk;
        }
        if (*col) {
            auto T = load_tree(tree_path);
            const int t = T.t();
            auto a = cut_coloring(T), b = balanced_cut_coloring(T);
            bool a_ok = 4 * a.c0 <= 3 * t - 1 && 2 * a.c1 <= t;
            bool b_ok = 3 * b.c0 <= 2 * t && 2 * b.c1 <= t;
            emit(json{{"schema", "coloring/1"},
                      {"t", t},
                      {"cut_coloring", coloring_json(a)},
                      {"cut_coloring_bounds", {{"4c0<=3t-1", 4 * a.c0 <= 3 * t - 1}, {"2c1<=t", 2 * a.c1 <= t}}},
                      {"balanced", coloring_json(b)},
                      {"balanced_bounds", {{"3c0<=2t", 3 * b.c0 <= 2 * t}, {"2c1<=t", 2 * b.c1 <= t}}}},
                 out);
            return a_ok && b_ok ? kOk : kRefuted;
        }
        if (*sep) {
            auto T = load_tree(tree_path);
            if (leaf < 0) leaf = detail::smallest_leaf(T);
            int z = half_separator(T, leaf);
            auto comps = components_without(T, z);
            std::vector<int> sizes;
            for (auto& c : comps) sizes.push_back(static_cast<int>(c.size()));
            emit(json{{"schema", "separator/1"}, {"leaf", leaf}, {"z", z}, {"component_sizes", sizes}, {"components", comps}},
                 out);
            return kOk;
        }
        if (*reg) {
            auto G = load_graph(graph_path, graph_format);
            auto v = check_regular_pair(G, parse_list(a_s), parse_list(b_s), parse_rational(eps_s),
                                        mode_s == "exhaustive" ? RegularityMode::Exhaustive : RegularityMode::Sampled,
                                        samples, seed);
            const char* kind = v.kind == RegularityVerdict::Regular     ? "Regular"
                               : v.kind == RegularityVerdict::Irregular ? "Irregular"
                                                                        : "Undecided";
            json j{{"schema", "regcheck/1"},
                   {"verdict", kind},
                   {"density", to_string(pair_density(G, parse_list(a_s), parse_list(b_s)))}};
            if (v.kind == RegularityVerdict::Irregular) j["witness"] = {{"X", v.X}, {"Y", v.Y}};
            emit(j, out);
            return kOk;
        }
        if (*red) {
            auto G = load_graph(graph_path, graph_format);
            std::vector<VertexSet> clusters;
            if (!partition_path.empty())
                clusters = json::parse(slurp(partition_path)).at("clusters").get<std::vector<VertexSet>>();
            else if (cluster_size > 0)
                clusters = heuristic_partition(G, cluster_size, seed);
            else
                throw Usage("reduce needs --partition or --cluster-size");
            std::optional<Rational> alpha;
            if (!alpha_s.empty()) alpha = parse_rational(alpha_s);
            auto RG = build_reduced_graph(G, clusters, parse_rational(eps_s), parse_rational(eta_s), alpha);
            json j{{"schema", "reduced-graph/1"}, {"partition", to_json(RG.partition)}, {"R", edges_json(RG.R)}};
            if (RG.transfer)
                j["transfer"] = {{"alpha", to_string(RG.transfer->alpha)},
                                 {"min_degree", RG.transfer->min_degree},
                                 {"bound", to_string(RG.transfer->bound)},
                                 {"hypothesis", RG.transfer->hypothesis},
                                 {"holds", RG.transfer->holds}};
            emit(j, out);
            return kOk;
        }
        if (*mat) {
            auto G = load_graph(graph_path, graph_format);
            if (!partition_path.empty()) {
                if (refine_t <= 0) throw Usage("matchdec --partition needs --t");
                auto P = partition_from_json(json::parse(slurp(partition_path)));
                if (P.density.empty()) P.density = density_matrix(G, P.clusters);
                auto r = refine_cluster_matching(G, P, refine_t);
                emit(json{{"schema", "refined-matching/1"},
                          {"partition", to_json(r.partition)},
                          {"M", r.M},
                          {"C", r.C},
                          {"V1", r.V1},
                          {"V2", r.V2},
                          {"covered_by_M", r.covered_by_M}},
                     out);
                return kOk;
            }
            auto D = matching_decomposition(G);
            emit(json{{"schema", "matching-decomposition/1"},
                      {"I", D.I},
                      {"M", D.M},
                      {"Gamma", D.Gamma},
                      {"V1", D.V1},
                      {"V2", D.V2},
                      {"exact", D.exact}},
                 out);
            return kOk;
        }
        if (*emb) {
            auto G = load_graph(graph_path, graph_format);
            auto T = load_tree(tree_path);
            PipelineOptions opt;
            opt.mode = parse_degree_mode(mode);
            opt.max_tree_degree = max_tree_degree;
            EmbedderConfig cfg;
            cfg.eps = parse_rational(eps_embed);
            cfg.eta = 5 * rational_sqrt(cfg.eps);
            cfg.delta = parse_rational(delta_s);
            if (!beta_opt.empty()) cfg.beta = parse_rational(beta_opt);
            if (cluster_size > 0) cfg.cluster_size = cluster_size;
            cfg.seed = seed;
            cfg.policy = force ? HypothesisPolicy::Warn : HypothesisPolicy::Refuse;
            try {
                auto res = embed_with_degree_conditions(G, T, opt, cfg);
                log_trace(res.trace, verbosity);
                bool valid = res.ok() && verify_embedding(T, G, res.embedding->map);
                if (res.ok() && !valid) throw InvariantViolation("pipeline returned an invalid embedding");
                json j = to_json(res);
                j["schema"] = "embed-result/1";
                j["verified"] = valid;
                emit(j, out);
                return res.ok() ? kOk : kRefuted;
            } catch (const PreconditionError& e) {
                emit(json{{"schema", "embed-result/1"}, {"ok", false}, {"refused", e.inequality}}, out);
                std::cerr << e.what() << " (use --force to continue)\n";
                return kUsage;
            }
        }
        if (*orc) {
            auto G = load_graph(graph_path, graph_format);
            auto T = load_tree(tree_path);
            auto r = embeds(T, G, budget);
            json j{{"schema", "oracle-result/1"}, {"status", to_string(r.status)}, {"nodes", r.nodes}};
            if (r.status == OracleStatus::Found) {
                if (!verify_embedding(T, G, r.witness.map)) throw InvariantViolation("oracle witness fails verification");
                j["witness"] = to_json(r.witness);
            }
            emit(j, out);
            return r.status == OracleStatus::Found ? kOk : r.status == OracleStatus::NotFound ? kRefuted : kBudget;
        }
        if (*swp) {
            SweepParams s;
            s.conj = parse_conjecture(conj);
            s.kmin = kmin;
            s.kmax = kmax;
            s.Delta = Delta;
            s.alpha = parse_rational(ell_alpha);
            if (!weaken_s.empty()) s.weaken = parse_rational(weaken_s);
            s.max_tree_degree = tree_cap;
            s.budget = budget;
            s.jobs = jobs;
            // random hosts sit on the unweakened thresholds at kmax, which
            // also meet the hypotheses of every smaller k
            auto thresholds = [&]() -> std::pair<int, int> {
                const Rational K(kmax);
                switch (s.conj) {
                    case Conjecture::TwoThirds: return {(2 * kmax) / 3, kmax};
                    case Conjecture::ConstDelta:
                        return {static_cast<int>(ceil_of(K / 2)),
                                static_cast<int>(ceil_of(2 * (1 - Rational(1, Delta)) * K))};
                    case Conjecture::Ell:
                        return {static_cast<int>(ceil_of((1 + s.alpha) * K / 2)),
                                static_cast<int>(ceil_of(2 * (1 - s.alpha) * K))};
                    default: return {(kmax + 1) / 2, 2 * kmax};
                }
            };
            std::vector<HostCase> hosts;
            auto add = [&](std::vector<HostCase> more) {
                for (auto& h : more) hosts.push_back(std::move(h));
            };
            auto [lo, hi] = thresholds();
            if (battery == "extremal" || (battery == "default" && s.conj == Conjecture::TwoKHalf))
                add(extremal_adjacent_hosts(kmax));
            if (battery == "random" || (battery == "default" && s.conj != Conjecture::ErdosSos))
                add(random_degree_hosts(random_count, lo, hi, seed));
            if (battery == "small" || (battery == "default" && s.conj == Conjecture::ErdosSos))
                add(all_small_graphs(nmax));
            if (battery == "example1") add(example1_hosts());
            if (verbosity) std::cerr << "sweep: " << hosts.size() << " hosts, k in [" << kmin << ", " << kmax << "]\n";
            auto rep = sweep_conjecture(s, hosts);
            if (verbosity)
                for (auto& [name, v] : rep.totals()) std::cerr << name << ": " << v << "\n";
            if (format == "csv")
                emit(to_csv(rep), out);
            else
                emit(to_json(rep), out);
            if (!rep.counterexamples.empty()) {
                write_counterexamples(rep, cex_dir);
                return kRefuted;
            }
            return rep.totals().at("BudgetExceeded") > 0 ? kBudget : kOk;
        }
        if (*gen) {
            std::vector<LabeledInstance> insts;
            if (example == "example1") insts.push_back(gen_spider_host(parse_rational(gen_eps), k));
            if (example == "delta") insts.push_back(gen_delta_example(delta_int, k));
            if (example == "two-thirds") insts = gen_two_thirds_hosts(k, a_size, b_size);
            if (example == "erdos-sos") insts = gen_erdos_sos_extremal(n, k);
            if (example == "random") {
                LabeledInstance inst;
                inst.host = random_host_with_degrees(n, min_deg, max_deg, seed);
                inst.source = "random";
                inst.params = {{"n", n}, {"min_deg", min_deg}, {"max_deg", max_deg}, {"seed", seed}};
                insts.push_back(std::move(inst));
            }
            json list = json::array();
            int code = kOk;
            for (std::size_t i = 0; i < insts.size(); ++i) {
                const auto& inst = insts[i];
                fs::path dir = fs::path(gen_dir) / (inst.source + "_" + std::to_string(i));
                write_bundle(inst, dir);
                json j = provenance(inst);
                j["bundle"] = dir.generic_string();
                if (verify && inst.pattern) {
                    auto r = embeds(*inst.pattern, inst.host, budget);
                    j["oracle"] = to_string(r.status);
                    if (r.status == OracleStatus::Found && !verify_embedding(*inst.pattern, inst.host, r.witness.map))
                        throw InvariantViolation("oracle witness fails verification");
                    bool judged = inst.claim != Claim::Unspecified;
                    bool confirmed = (inst.claim == Claim::NotEmbeddable && r.status == OracleStatus::NotFound) ||
                                     (inst.claim == Claim::Embeddable && r.status == OracleStatus::Found);
                    if (judged) j["confirmed"] = confirmed;
                    if (r.status == OracleStatus::BudgetExceeded && judged && code == kOk) code = kBudget;
                    if (judged && r.status != OracleStatus::BudgetExceeded && !confirmed) code = kRefuted;
                }
                list.push_back(j);
            }
            emit(json{{"schema", "instances/1"}, {"instances", list}}, out);
            return code;
        }
    } catch (const Usage& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ContractViolation& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const PreconditionError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "bad JSON input: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
