#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "graph.hpp"
#include "tree.hpp"

namespace treembed {

// map[v] is the host image of pattern vertex v.
struct Embedding {
    std::vector<int> map;
};

inline bool verify_embedding(const RootedTree& T, const Graph& G, const std::vector<int>& phi) {
    if (static_cast<int>(phi.size()) != T.n()) return false;
    std::vector<char> hit(G.n(), 0);
    for (int h : phi) {
        if (h < 0 || h >= G.n() || hit[h]) return false;
        hit[h] = 1;
    }
    for (auto [u, v] : T.edges())
        if (!G.adjacent(phi[u], phi[v])) return false;
    return true;
}

inline nlohmann::json to_json(const Embedding& e) {
    auto out = nlohmann::json::array();
    for (std::size_t v = 0; v < e.map.size(); ++v) out.push_back({static_cast<int>(v), e.map[v]});
    return out;
}

enum class OracleStatus { Found, NotFound, BudgetExceeded };

inline const char* to_string(OracleStatus s) {
    switch (s) {
        case OracleStatus::Found: return "Found";
        case OracleStatus::NotFound: return "NotFound";
        default: return "BudgetExceeded";
    }
}

struct OracleResult {
    OracleStatus status = OracleStatus::NotFound;
    Embedding witness;  // filled iff Found
    std::uint64_t nodes = 0;
};

inline constexpr std::uint64_t kDefaultOracleBudget = 100'000'000;

namespace detail {

// Twin classes: vertices with equal open or equal closed neighbourhoods are
// swapped by an automorphism fixing everything else. Class id = smallest member.
inline std::vector<int> twin_classes(const Graph& G) {
    const int n = G.n();
    std::vector<int> cls(n, -1);
    std::map<std::vector<int>, int> open, closed;
    for (int v = 0; v < n; ++v) {
        auto [it, fresh] = open.emplace(G.neighbors(v), v);
        cls[v] = it->second;
    }
    std::vector<int> count(n, 0);
    for (int v = 0; v < n; ++v) ++count[cls[v]];
    for (int v = 0; v < n; ++v) {
        if (count[cls[v]] > 1) continue;
        VertexSet nb = G.neighbors(v);
        nb.insert(std::lower_bound(nb.begin(), nb.end(), v), v);
        auto [it, fresh] = closed.emplace(std::move(nb), v);
        cls[v] = it->second;
    }
    return cls;
}

class TreeSearch {
public:
    TreeSearch(const RootedTree& T, const Graph& G, std::uint64_t budget) : T_(T), G_(G), budget_(budget) {}

    OracleResult run() {
        OracleResult out;
        const int n = T_.n();
        if (n > G_.n()) return out;
        if (n == 1) {
            out.status = OracleStatus::Found;
            out.witness.map = {0};
            return out;
        }
        if (n == 2) {
            for (int u = 0; u < G_.n(); ++u)
                if (G_.degree(u) > 0) {
                    out.status = OracleStatus::Found;
                    out.witness.map = {u, G_.neighbors(u).front()};
                    if (T_.root() == 1) std::swap(out.witness.map[0], out.witness.map[1]);
                    return out;
                }
            return out;
        }
        prepare();
        bool found = place(0);
        out.nodes = nodes_;
        if (found) {
            out.status = OracleStatus::Found;
            out.witness.map = result_;
        } else {
            out.status = exceeded_ ? OracleStatus::BudgetExceeded : OracleStatus::NotFound;
        }
        return out;
    }

private:
    const RootedTree& T_;
    const Graph& G_;
    std::uint64_t budget_, nodes_ = 0;
    bool exceeded_ = false;

    std::vector<int> order_;        // skeleton vertices, BFS from a centroid
    std::vector<int> parent_idx_;   // index into order_ of the skeleton parent
    std::vector<int> iso_prev_;     // earlier isomorphic sibling index, or -1
    std::vector<int> leaves_;       // leaf neighbours per skeleton index
    std::vector<std::vector<int>> leaf_ids_;
    std::vector<int> need_free_;    // pattern neighbours still to place
    std::vector<int> tdeg_;

    std::vector<int> cls_, img_, comp_, side_;
    std::vector<std::vector<int>> members_;
    std::vector<std::array<int, 2>> comp_sides_;  // {-1,-1} when not bipartite
    std::vector<int> comp_size_;
    std::vector<char> used_;
    std::array<int, 2> tree_class_{};  // tree class of the skeleton root, the other

    std::vector<int> owner_, seen_;
    int stamp_ = 0;
    std::vector<int> result_;

    void prepare() {
        const int n = T_.n();
        int c = centroids(T_).front();
        RootedTree R = T_.root() == c ? T_ : T_.rerooted(c);
        // rooted isomorphism codes
        std::vector<int> code(n, 0);
        std::map<std::vector<int>, int> ids;
        for (int v : R.postorder()) {
            std::vector<int> key;
            for (int ch : R.children(v)) key.push_back(code[ch]);
            std::sort(key.begin(), key.end());
            code[v] = ids.emplace(std::move(key), static_cast<int>(ids.size())).first->second;
        }
        std::vector<int> index(n, -1);
        order_ = {c};
        parent_idx_ = {-1};
        iso_prev_ = {-1};
        index[c] = 0;
        for (std::size_t i = 0; i < order_.size(); ++i) {
            int v = order_[i];
            std::vector<int> kids;
            for (int ch : R.children(v))
                if (!R.children(ch).empty()) kids.push_back(ch);
            std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
                if (R.subtree_size(a) != R.subtree_size(b)) return R.subtree_size(a) > R.subtree_size(b);
                return code[a] < code[b];
            });
            for (std::size_t j = 0; j < kids.size(); ++j) {
                index[kids[j]] = static_cast<int>(order_.size());
                order_.push_back(kids[j]);
                parent_idx_.push_back(static_cast<int>(i));
                iso_prev_.push_back(j > 0 && code[kids[j - 1]] == code[kids[j]] ? index[kids[j - 1]] : -1);
            }
        }
        const int s = static_cast<int>(order_.size());
        leaves_.assign(s, 0);
        leaf_ids_.assign(s, {});
        need_free_.assign(s, 0);
        tdeg_.assign(s, 0);
        for (int i = 0; i < s; ++i) {
            int v = order_[i];
            tdeg_[i] = R.degree(v);
            need_free_[i] = static_cast<int>(R.children(v).size());
            for (int ch : R.children(v))
                if (R.children(ch).empty()) leaf_ids_[i].push_back(ch);
            leaves_[i] = static_cast<int>(leaf_ids_[i].size());
        }
        int even = 0;
        for (int v = 0; v < n; ++v) even += R.depth(v) % 2 == 0;
        tree_class_ = {even, n - even};

        const int N = G_.n();
        cls_ = twin_classes(G_);
        members_.assign(N, {});
        for (int v = 0; v < N; ++v) members_[cls_[v]].push_back(v);
        comp_.assign(N, -1);
        side_.assign(N, 0);
        for (const auto& comp : components(G_)) {
            int id = static_cast<int>(comp_size_.size());
            comp_size_.push_back(static_cast<int>(comp.size()));
            for (int v : comp) comp_[v] = id;
            if (auto b = bipartition(G_, comp)) {
                for (int v : b->classB) side_[v] = 1;
                comp_sides_.push_back({static_cast<int>(b->classA.size()), static_cast<int>(b->classB.size())});
            } else {
                comp_sides_.push_back({-1, -1});
            }
        }
        img_.assign(s, -1);
        used_.assign(N, 0);
        owner_.assign(N, -1);
        seen_.assign(N, 0);
    }

    bool root_fits(int h) const {
        int id = comp_[h];
        if (comp_size_[id] < T_.n()) return false;
        auto sides = comp_sides_[id];
        if (sides[0] < 0) return true;
        int mine = sides[side_[h]], other = sides[1 - side_[h]];
        return tree_class_[0] <= mine && tree_class_[1] <= other;
    }

    // Smallest unused member of its twin class.
    bool is_class_front(int h) const {
        for (int w : members_[cls_[h]]) {
            if (w == h) return true;
            if (!used_[w]) return false;
        }
        return true;
    }

    bool augment(int i) {
        for (int w : G_.neighbors(img_[i])) {
            if (used_[w] || seen_[w] == stamp_) continue;
            seen_[w] = stamp_;
            if (owner_[w] < 0 || augment(owner_[w])) {
                owner_[w] = i;
                return true;
            }
        }
        return false;
    }

    // Leaves of placed skeleton vertices can be given distinct free images.
    bool leaves_fit(int upto) {
        std::fill(owner_.begin(), owner_.end(), -1);
        for (int i = 0; i <= upto; ++i)
            for (int r = 0; r < leaves_[i]; ++r) {
                ++stamp_;
                if (!augment(i)) return false;
            }
        return true;
    }

    int free_neighbours(int h) const {
        int c = 0;
        for (int w : G_.neighbors(h)) c += !used_[w];
        return c;
    }

    bool place(int i) {
        const int s = static_cast<int>(order_.size());
        if (i == s) {
            if (!leaves_fit(s - 1)) return false;
            result_.assign(T_.n(), -1);
            for (int j = 0; j < s; ++j) result_[order_[j]] = img_[j];
            std::vector<std::vector<int>> by_owner(s);
            for (int w = 0; w < G_.n(); ++w)
                if (owner_[w] >= 0) by_owner[owner_[w]].push_back(w);
            for (int j = 0; j < s; ++j)
                for (int r = 0; r < leaves_[j]; ++r) result_[leaf_ids_[j][r]] = by_owner[j][r];
            return true;
        }
        std::vector<int> cand;
        if (i == 0) {
            for (int h = 0; h < G_.n(); ++h)
                if (cls_[h] == h && root_fits(h)) cand.push_back(h);
        } else {
            cand = G_.neighbors(img_[parent_idx_[i]]);
        }
        const int floor_cls = iso_prev_[i] >= 0 ? cls_[img_[iso_prev_[i]]] : -1;
        for (int h : cand) {
            if (used_[h] || G_.degree(h) < tdeg_[i] || cls_[h] < floor_cls) continue;
            if (i > 0 && !is_class_front(h)) continue;
            if (++nodes_ > budget_) {
                exceeded_ = true;
                return false;
            }
            used_[h] = 1;
            img_[i] = h;
            bool ok = free_neighbours(h) >= need_free_[i] && (leaves_[i] == 0 || leaves_fit(i));
            if (ok && place(i + 1)) return true;
            used_[h] = 0;
            img_[i] = -1;
            if (exceeded_) return false;
        }
        return false;
    }
};

}  // namespace detail

// Exact decision: Found carries a verified witness; NotFound means the search
// was exhausted; BudgetExceeded means more than `budget` placements were tried.
inline OracleResult embeds(const RootedTree& T, const Graph& G, std::uint64_t budget = kDefaultOracleBudget) {
    auto out = detail::TreeSearch(T, G, budget).run();
    if (out.status == OracleStatus::Found && !verify_embedding(T, G, out.witness.map))
        throw InvariantViolation("oracle produced an invalid witness");
    return out;
}

}  // namespace treembed
