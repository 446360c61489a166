#pragma once

#include <algorithm>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/serialize.hpp"
#include "ctxpat/suffix_tree.hpp"

namespace ctxpat {

/// Heavy-path decomposition of a suffix tree. Subtree size is the number of
/// leaf ids below a node; among equally large children the last one (largest
/// first letter) is heavy.
struct HeavyPathDecomposition {
    std::vector<index_t> heavy_child; // kNone on leaves
    std::vector<index_t> head;        // light node starting the node's heavy path
    std::vector<index_t> path_leaf;   // for light nodes: last node of their heavy path
    std::vector<index_t> light_nodes; // in preorder

    bool is_light(index_t v) const { return head[v] == v; }
    /// Lowest light ancestor of v (v itself when light).
    index_t light_ancestor(index_t v) const { return head[v]; }

    void write(BinaryWriter& w) const {
        w.put_vector(heavy_child);
        w.put_vector(head);
        w.put_vector(path_leaf);
        w.put_vector(light_nodes);
    }

    static HeavyPathDecomposition read(BinaryReader& r, index_t node_count) {
        HeavyPathDecomposition h;
        h.heavy_child = r.get_vector<index_t>();
        h.head = r.get_vector<index_t>();
        h.path_leaf = r.get_vector<index_t>();
        h.light_nodes = r.get_vector<index_t>();
        bool ok = h.heavy_child.size() == node_count && h.head.size() == node_count &&
                  h.path_leaf.size() == node_count;
        for (index_t v = 0; ok && v < node_count; ++v) {
            ok = h.head[v] < node_count && (h.heavy_child[v] == kNone || h.heavy_child[v] < node_count);
        }
        for (index_t u : h.light_nodes) {
            ok = ok && u < node_count && h.path_leaf[u] < node_count;
        }
        if (!ok) {
            throw FormatError("corrupt heavy-path data");
        }
        return h;
    }
};

inline HeavyPathDecomposition decompose(const SuffixTree& st) {
    const index_t n = st.node_count();
    HeavyPathDecomposition h;
    h.heavy_child.assign(n, kNone);
    h.head.assign(n, kNone);
    h.path_leaf.assign(n, kNone);
    for (index_t v = 0; v < n; ++v) {
        index_t best = kNone;
        for (index_t c : st.children(v)) {
            if (best == kNone || st.leaf_count(c) >= st.leaf_count(best)) {
                best = c;
            }
        }
        h.heavy_child[v] = best;
    }
    // Parents precede children in preorder.
    for (index_t v = 0; v < n; ++v) {
        if (v == st.root() || h.heavy_child[st.parent(v)] != v) {
            h.head[v] = v;
            h.light_nodes.push_back(v);
            index_t x = v;
            while (h.heavy_child[x] != kNone) {
                x = h.heavy_child[x];
            }
            h.path_leaf[v] = x;
        } else {
            h.head[v] = h.head[st.parent(v)];
        }
    }
    return h;
}

/// Largest number of light nodes on any root-to-leaf path.
inline index_t max_light_depth(const SuffixTree& st, const HeavyPathDecomposition& h) {
    std::vector<index_t> count(st.node_count(), 0);
    index_t best = 0;
    for (index_t v = 0; v < st.node_count(); ++v) {
        const index_t above = v == st.root() ? 0 : count[st.parent(v)];
        count[v] = above + (h.is_light(v) ? 1 : 0);
        if (st.is_leaf(v)) {
            best = std::max(best, count[v]);
        }
    }
    return best;
}

} // namespace ctxpat
