#pragma once

#include <functional>
#include <vector>

#include "tree.hpp"

namespace treembed {

namespace detail {

// Rooted trees of each size, as preorder parent arrays with the root at 0.
// A tree is a root plus a multiset of smaller rooted trees; multisets are
// generated as nondecreasing sequences of (size, index).
class RootedCatalogue {
public:
    explicit RootedCatalogue(int max_size) : cat_(max_size + 1) {
        if (max_size >= 1) cat_[1].push_back({0});
        for (int s = 2; s <= max_size; ++s) {
            std::vector<Item> items = items_upto(s - 1);
            std::vector<int> pick;
            multisets(items, 0, s - 1, pick, [&](const std::vector<int>& chosen) {
                cat_[s].push_back(assemble(items, chosen));
            });
        }
    }

    const std::vector<std::vector<int>>& of_size(int s) const { return cat_[s]; }

    struct Item {
        int size;
        int index;
    };

    std::vector<Item> items_upto(int max_size) const {
        std::vector<Item> items;
        for (int s = 1; s <= max_size; ++s)
            for (int i = 0; i < static_cast<int>(cat_[s].size()); ++i) items.push_back({s, i});
        return items;
    }

    template <class F>
    void multisets(const std::vector<Item>& items, std::size_t from, int remaining, std::vector<int>& pick, F&& emit) const {
        if (remaining == 0) {
            emit(pick);
            return;
        }
        for (std::size_t i = from; i < items.size(); ++i) {
            if (items[i].size > remaining) break;
            pick.push_back(static_cast<int>(i));
            multisets(items, i, remaining - items[i].size, pick, emit);
            pick.pop_back();
        }
    }

    std::vector<int> assemble(const std::vector<Item>& items, const std::vector<int>& chosen) const {
        std::vector<int> parent{0};
        for (int c : chosen) {
            const auto& sub = cat_[items[c].size][items[c].index];
            int off = static_cast<int>(parent.size());
            for (std::size_t v = 0; v < sub.size(); ++v) parent.push_back(v == 0 ? 0 : sub[v] + off);
        }
        return parent;
    }

private:
    std::vector<std::vector<std::vector<int>>> cat_;
};

}  // namespace detail

// Calls `emit` once per isomorphism class of free trees on n vertices, each
// rooted at a centroid. Unicentroidal trees are a root with branches of
// size < n/2; bicentroidal ones are two rooted trees of size n/2 joined at
// their roots.
inline void enumerate_trees(int n, const std::function<void(const RootedTree&)>& emit) {
    if (n < 1 || n > 20) throw ContractViolation("enumerate_trees: n must be in 1..20");
    int half = (n - 1) / 2;
    detail::RootedCatalogue cat(std::max(half, n / 2));
    auto items = cat.items_upto(half);
    std::vector<int> pick;
    cat.multisets(items, 0, n - 1, pick, [&](const std::vector<int>& chosen) {
        emit(RootedTree(cat.assemble(items, chosen)));
    });
    if (n % 2 == 0) {
        const auto& side = cat.of_size(n / 2);
        for (std::size_t i = 0; i < side.size(); ++i)
            for (std::size_t j = i; j < side.size(); ++j) {
                std::vector<int> parent = side[i];
                int off = static_cast<int>(parent.size());
                for (std::size_t v = 0; v < side[j].size(); ++v) parent.push_back(v == 0 ? 0 : side[j][v] + off);
                emit(RootedTree(std::move(parent)));
            }
    }
}

inline std::vector<RootedTree> all_trees(int n) {
    std::vector<RootedTree> out;
    enumerate_trees(n, [&](const RootedTree& T) { out.push_back(T); });
    return out;
}

}  // namespace treembed
