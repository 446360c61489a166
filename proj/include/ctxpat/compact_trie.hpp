#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "ctxpat/common.hpp"

namespace ctxpat::detail {

/// Shape of a compact trie over a sorted list of distinct items, with nodes
/// numbered in preorder (root = 0). Items are identified by their position in
/// the sorted list; every node covers a contiguous item range [lo, hi].
struct TrieShape {
    std::vector<index_t> parent; // kNone for the root
    std::vector<index_t> depth;  // string depth; leaves of items carry `inf`
    std::vector<index_t> lo;
    std::vector<index_t> hi;
    std::vector<index_t> end;       // last preorder id inside the subtree
    std::vector<index_t> item_node; // node where each item's path ends

    index_t size() const noexcept { return static_cast<index_t>(parent.size()); }
};

inline void compute_subtree_ends(TrieShape& t) {
    const index_t n = t.size();
    t.end.resize(n);
    for (index_t v = 0; v < n; ++v) {
        t.end[v] = v;
    }
    for (index_t v = n; v-- > 1;) {
        t.end[t.parent[v]] = std::max(t.end[t.parent[v]], t.end[v]);
    }
}

/// Builds the compact trie of `adjacent_lcp.size()` sorted, pairwise distinct
/// strings, none a prefix of another. adjacent_lcp[k] is the LCP of items k-1
/// and k; adjacent_lcp[0] is ignored.
inline TrieShape build_trie(std::span<const index_t> adjacent_lcp, index_t inf) {
    const auto items = static_cast<index_t>(adjacent_lcp.size());
    std::vector<index_t> parent{kNone}, depth{0}, lo{0}, hi{0};
    std::vector<index_t> item_leaf(items);
    auto make = [&](index_t d, index_t first) {
        parent.push_back(kNone);
        depth.push_back(d);
        lo.push_back(first);
        hi.push_back(first);
        return static_cast<index_t>(parent.size() - 1);
    };

    std::vector<index_t> stack{0};
    for (index_t k = 0; k < items; ++k) {
        const index_t h = k == 0 ? 0 : adjacent_lcp[k];
        bool popped = false;
        while (depth[stack.back()] > h) {
            const index_t x = stack.back();
            stack.pop_back();
            popped = true;
            hi[x] = k - 1;
            if (depth[stack.back()] >= h) {
                parent[x] = stack.back();
            } else {
                const index_t w = make(h, lo[x]);
                parent[x] = w;
                stack.push_back(w);
            }
        }
        if (!popped && depth[stack.back()] < h) {
            const index_t w = make(h, k - 1);
            parent[item_leaf[k - 1]] = w;
            stack.push_back(w);
        }
        const index_t leaf = make(inf, k);
        parent[leaf] = stack.back();
        item_leaf[k] = leaf;
    }
    while (stack.size() > 1) {
        const index_t x = stack.back();
        stack.pop_back();
        hi[x] = items == 0 ? 0 : items - 1;
        parent[x] = stack.back();
    }
    hi[0] = items == 0 ? 0 : items - 1;

    // Preorder = order by (first item, depth): ancestors sharing a first item
    // are shallower, and disjoint subtrees are ordered by their item ranges.
    const auto count = static_cast<index_t>(parent.size());
    std::vector<index_t> order(count);
    for (index_t v = 0; v < count; ++v) {
        order[v] = v;
    }
    std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
        return lo[a] != lo[b] ? lo[a] < lo[b] : depth[a] < depth[b];
    });
    std::vector<index_t> rename(count);
    for (index_t i = 0; i < count; ++i) {
        rename[order[i]] = i;
    }

    TrieShape t;
    t.parent.resize(count);
    t.depth.resize(count);
    t.lo.resize(count);
    t.hi.resize(count);
    for (index_t i = 0; i < count; ++i) {
        const index_t v = order[i];
        t.parent[i] = parent[v] == kNone ? kNone : rename[parent[v]];
        t.depth[i] = depth[v];
        t.lo[i] = lo[v];
        t.hi[i] = hi[v];
    }
    t.item_node.resize(items);
    for (index_t k = 0; k < items; ++k) {
        t.item_node[k] = rename[item_leaf[k]];
    }
    compute_subtree_ends(t);
    return t;
}

struct Truncated {
    TrieShape shape;
    std::vector<index_t> source; // full-trie node each kept node came from
};

/// Cuts every root path just before its first gap marker. cap[k] is the number
/// of letters of item k before its first marker (kNone when there is none).
/// A cut inside an edge leaves a leaf of finite depth; a cut at a node drops
/// the edge and maps its items to that node. Kept nodes retain the full item
/// ranges of the nodes they came from.
inline Truncated truncate_trie(const TrieShape& full, std::span<const index_t> cap) {
    Truncated out;
    TrieShape& t = out.shape;
    std::vector<index_t> rename(full.size(), kNone);
    t.item_node.assign(full.item_node.size(), kNone);

    auto keep = [&](index_t v, index_t depth) {
        const index_t id = t.size();
        rename[v] = id;
        t.parent.push_back(full.parent[v] == kNone ? kNone : rename[full.parent[v]]);
        t.depth.push_back(depth);
        t.lo.push_back(full.lo[v]);
        t.hi.push_back(full.hi[v]);
        out.source.push_back(v);
        return id;
    };

    for (index_t v = 0; v < full.size();) {
        if (v == 0) {
            keep(v, full.depth[v]);
            ++v;
            continue;
        }
        const index_t c = cap[full.lo[v]];
        const bool has_marker = c != kNone && c < full.depth[v];
        if (!has_marker) {
            const index_t id = keep(v, full.depth[v]);
            if (full.lo[v] == full.hi[v] && full.end[v] == v) {
                t.item_node[full.lo[v]] = id;
            }
            ++v;
            continue;
        }
        const index_t p = rename[full.parent[v]];
        index_t target = p;
        if (c > full.depth[full.parent[v]]) {
            target = keep(v, c);
        }
        for (index_t k = full.lo[v]; k <= full.hi[v]; ++k) {
            t.item_node[k] = target;
        }
        v = full.end[v] + 1;
    }
    compute_subtree_ends(t);
    return out;
}

} // namespace ctxpat::detail
