#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/compact_trie.hpp"
#include "ctxpat/heavy_path.hpp"
#include "ctxpat/suffix_array.hpp"
#include "ctxpat/suffix_tree.hpp"

namespace ctxpat {

/// Suffix structures of the reverse text (payload reversed, then the
/// terminator). The text prefix T[1..p] read backwards followed by the
/// terminator is the reverse suffix starting at 0-based n - 1 - p.
struct ReverseIndex {
    index_t n = 0;
    std::vector<index_t> rank; // rank of each reverse start
    RangeMin lcp_min;
    std::vector<index_t> gap; // letters before the next kHash, per reverse start

    index_t start_of_prefix(index_t p) const { return n - 1 - p; }

    index_t lcp_of_ranks(index_t a, index_t b) const {
        if (a > b) {
            std::swap(a, b);
        }
        return lcp_min.min(a + 1, b);
    }
};

inline ReverseIndex make_reverse_index(std::span<const Symbol> text) {
    std::vector<Symbol> rev(text.rbegin() + 1, text.rend());
    rev.push_back(kDollar);
    ReverseIndex out;
    out.n = static_cast<index_t>(rev.size());
    const auto sa = build_sa(rev);
    auto isa = build_isa(sa);
    const auto lcp = build_lcp(rev, sa, isa);
    out.rank = std::move(isa.rank);
    out.lcp_min = RangeMin(lcp.lcp);
    out.gap = SuffixTree::gap_distances(rev);
    return out;
}

/// Compact trie of the reversed, terminated text prefixes preceding the
/// suffixes in one suffix-tree node's leaf range, with phi values.
struct PrefixTree {
    detail::TrieShape shape;
    std::vector<index_t> phi;   // per node; empty when not computed
    std::vector<index_t> items; // 0-based forward ranks, in trie order

    index_t size() const noexcept { return shape.size(); }
    index_t parent_depth_plus_one(index_t v) const {
        return shape.parent[v] == kNone ? 0 : shape.depth[shape.parent[v]] + 1;
    }
};

struct PrefixTreeOptions {
    // Compute phi against the heavy path of u.
    const HeavyPathDecomposition* hpd = nullptr;
    // Per text position: letters before the next kHash (kNone if none). When
    // non-empty, phi is capped by it and the tree is cut before each kHash.
    std::span<const index_t> forward_gap;
};

/// For u's leaf rank k: string depth of the deepest node of u's heavy path on
/// the root path of k's suffix.
inline index_t heavy_path_exit_depth(const SuffixTree& st, const HeavyPathDecomposition& hpd, index_t u,
                                     index_t k) {
    index_t x = st.node_of_rank(k);
    while (hpd.head[x] != u) {
        x = st.parent(hpd.head[x]);
    }
    return st.string_depth(x);
}

inline PrefixTree build_prefix_tree(const SuffixTree& st, const ReverseIndex& rev, index_t u,
                                    const PrefixTreeOptions& opt = {}) {
    const auto [first, last] = st.leaf_range(u);
    const auto sa = st.suffix_array();
    std::vector<index_t> items; // forward ranks, ordered by reverse rank
    items.reserve(last - first + 1);
    for (index_t k = first - 1; k < last; ++k) {
        items.push_back(k);
    }
    auto rev_rank = [&](index_t k) { return rev.rank[rev.start_of_prefix(sa[k])]; };
    std::sort(items.begin(), items.end(), [&](index_t a, index_t b) { return rev_rank(a) < rev_rank(b); });

    std::vector<index_t> adj(items.size(), 0);
    for (std::size_t i = 1; i < items.size(); ++i) {
        adj[i] = rev.lcp_of_ranks(rev_rank(items[i - 1]), rev_rank(items[i]));
    }
    const index_t inf = rev.n + 1;
    PrefixTree pt;
    pt.shape = detail::build_trie(adj, inf);
    pt.items = items;

    std::vector<index_t> full_phi;
    if (opt.hpd != nullptr) {
        full_phi.assign(pt.shape.size(), 0);
        for (std::size_t i = 0; i < items.size(); ++i) {
            index_t phi = heavy_path_exit_depth(st, *opt.hpd, u, items[i]);
            if (!opt.forward_gap.empty()) {
                phi = std::min(phi, opt.forward_gap[sa[items[i]]]);
            }
            full_phi[pt.shape.item_node[i]] = phi;
        }
        for (index_t v = pt.shape.size(); v-- > 1;) {
            const index_t p = pt.shape.parent[v];
            full_phi[p] = std::max(full_phi[p], full_phi[v]);
        }
    }

    if (opt.forward_gap.empty()) {
        pt.phi = std::move(full_phi);
        return pt;
    }
    std::vector<index_t> cap(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        cap[i] = rev.gap[rev.start_of_prefix(sa[items[i]])];
    }
    auto cut = detail::truncate_trie(pt.shape, cap);
    pt.shape = std::move(cut.shape);
    if (!full_phi.empty()) {
        pt.phi.resize(pt.shape.size());
        for (index_t v = 0; v < pt.shape.size(); ++v) {
            pt.phi[v] = full_phi[cut.source[v]];
        }
    }
    return pt;
}

} // namespace ctxpat
