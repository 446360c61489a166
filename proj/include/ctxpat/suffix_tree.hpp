#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/compact_trie.hpp"
#include "ctxpat/serialize.hpp"
#include "ctxpat/suffix_array.hpp"

namespace ctxpat {

/// Suffix tree stored in preorder: node id v has preorder rank v + 1, the
/// root is node 0, and the subtree of v is the id range [v, subtree_end(v)].
/// Children are ordered by first edge letter, so leaves appear in suffix
/// array order.
///
/// A truncated tree cuts every root path just before its first gap marker
/// (kHash). Truncated nodes keep the leaf range of the untruncated nodes they
/// stand for, so leaf ranges always refer to suffix-array ranks.
class SuffixTree {
public:
    using NodeId = index_t;

    SuffixTree() = default;

    static SuffixTree build(std::span<const Symbol> text, const SuffixArray& sa, const LcpArray& lcp) {
        SuffixTree st;
        st.text_.assign(text.begin(), text.end());
        st.sa_ = sa.pos;
        st.shape_ = detail::build_trie(lcp.lcp, st.inf_depth());
        st.finish();
        return st;
    }

    static SuffixTree build(const Text& t, const SuffixArray& sa, const LcpArray& lcp) {
        return build(t.symbols(), sa, lcp);
    }

    /// Tree truncated before the first kHash on every root path.
    static SuffixTree build_truncated(std::span<const Symbol> text, const SuffixArray& sa, const LcpArray& lcp) {
        SuffixTree st;
        st.text_.assign(text.begin(), text.end());
        st.sa_ = sa.pos;
        auto full = detail::build_trie(lcp.lcp, st.inf_depth());
        const auto gap = gap_distances(text);
        std::vector<index_t> cap(sa.size());
        for (index_t k = 0; k < sa.size(); ++k) {
            cap[k] = gap[sa.pos[k]];
        }
        st.shape_ = detail::truncate_trie(full, cap).shape;
        st.finish();
        return st;
    }

    /// For every position, the number of letters before the next kHash at or
    /// after it (kNone if there is none).
    static std::vector<index_t> gap_distances(std::span<const Symbol> text) {
        std::vector<index_t> out(text.size(), kNone);
        index_t next = kNone;
        for (auto i = static_cast<index_t>(text.size()); i-- > 0;) {
            if (text[i] == kHash) {
                next = i;
            }
            out[i] = next == kNone ? kNone : next - i;
        }
        return out;
    }

    index_t text_size() const noexcept { return static_cast<index_t>(text_.size()); }
    std::span<const Symbol> text() const noexcept { return text_; }
    std::span<const index_t> suffix_array() const noexcept { return sa_; }

    index_t node_count() const noexcept { return shape_.size(); }
    NodeId root() const noexcept { return 0; }
    index_t preorder(NodeId v) const noexcept { return v + 1; }

    /// Depth assigned to leaves (n + 1): above every finite depth.
    index_t inf_depth() const noexcept { return text_size() + 1; }
    index_t string_depth(NodeId v) const { return shape_.depth[v]; }
    bool has_infinite_depth(NodeId v) const { return shape_.depth[v] == inf_depth(); }

    NodeId parent(NodeId v) const { return shape_.parent[v]; }
    std::span<const NodeId> children(NodeId v) const {
        return std::span(children_).subspan(child_begin_[v], child_begin_[v + 1] - child_begin_[v]);
    }
    bool is_leaf(NodeId v) const { return child_begin_[v] == child_begin_[v + 1]; }

    /// Inclusive range of 1-based leaf ids (suffix-array ranks) below v.
    std::pair<index_t, index_t> leaf_range(NodeId v) const { return {shape_.lo[v] + 1, shape_.hi[v] + 1}; }
    index_t leaf_count(NodeId v) const { return shape_.hi[v] - shape_.lo[v] + 1; }

    NodeId subtree_end(NodeId v) const { return shape_.end[v]; }
    /// Rightmost leaf below v: the last node of v's preorder range.
    NodeId rleaf(NodeId v) const { return shape_.end[v]; }

    /// Node where the path of the suffix with 0-based rank k ends.
    NodeId node_of_rank(index_t k) const { return shape_.item_node[k]; }

    /// 0-based text position at which str(v) occurs.
    index_t label_position(NodeId v) const { return sa_[shape_.lo[v]]; }

    /// Letter of str(v) at 0-based offset d (d < depth of v).
    Symbol label_letter(NodeId v, index_t d) const { return text_[label_position(v) + d]; }

    std::optional<NodeId> child_by_letter(NodeId v, Symbol c) const {
        const auto b = child_letter_.begin() + child_begin_[v];
        const auto e = child_letter_.begin() + child_begin_[v + 1];
        const auto it = std::lower_bound(b, e, c);
        if (it == e || *it != c) {
            return std::nullopt;
        }
        return children_[static_cast<std::size_t>(it - child_letter_.begin())];
    }

    /// Shallowest node whose label has `pattern` as a prefix.
    std::optional<NodeId> locus(std::span<const Symbol> pattern) const {
        const auto m = static_cast<index_t>(pattern.size());
        NodeId v = root();
        index_t d = 0;
        while (d < m) {
            const auto c = child_by_letter(v, pattern[d]);
            if (!c) {
                return std::nullopt;
            }
            const index_t stop = std::min(shape_.depth[*c], m);
            const index_t base = label_position(*c);
            for (index_t j = d + 1; j < stop; ++j) {
                if (base + j >= text_size() || text_[base + j] != pattern[j]) {
                    return std::nullopt;
                }
            }
            if (shape_.depth[*c] >= m) {
                return *c;
            }
            v = *c;
            d = shape_.depth[*c];
        }
        return v;
    }

    void write(BinaryWriter& w) const {
        w.put_vector(text_);
        w.put_vector(sa_);
        w.put_vector(shape_.parent);
        w.put_vector(shape_.depth);
        w.put_vector(shape_.lo);
        w.put_vector(shape_.hi);
        w.put_vector(shape_.item_node);
    }

    static SuffixTree read(BinaryReader& r) {
        SuffixTree st;
        st.text_ = r.get_vector<Symbol>();
        st.sa_ = r.get_vector<index_t>();
        st.shape_.parent = r.get_vector<index_t>();
        st.shape_.depth = r.get_vector<index_t>();
        st.shape_.lo = r.get_vector<index_t>();
        st.shape_.hi = r.get_vector<index_t>();
        st.shape_.item_node = r.get_vector<index_t>();
        st.validate();
        detail::compute_subtree_ends(st.shape_);
        st.finish();
        return st;
    }

private:
    void validate() const {
        const auto n = shape_.size();
        const auto items = static_cast<index_t>(sa_.size());
        bool ok = n > 0 && shape_.depth.size() == n && shape_.lo.size() == n && shape_.hi.size() == n &&
                  sa_.size() == text_.size() && shape_.item_node.size() == items && shape_.parent[0] == kNone;
        for (index_t v = 1; ok && v < n; ++v) {
            ok = shape_.parent[v] < v;
        }
        for (index_t v = 0; ok && v < n; ++v) {
            ok = shape_.lo[v] <= shape_.hi[v] && shape_.hi[v] < items;
        }
        for (index_t k = 0; ok && k < items; ++k) {
            ok = shape_.item_node[k] < n && sa_[k] < items;
        }
        if (!ok) {
            throw FormatError("corrupt suffix tree");
        }
    }

    void finish() {
        const index_t n = shape_.size();
        child_begin_.assign(n + 1, 0);
        for (index_t v = 1; v < n; ++v) {
            ++child_begin_[shape_.parent[v] + 1];
        }
        for (index_t v = 0; v < n; ++v) {
            child_begin_[v + 1] += child_begin_[v];
        }
        children_.assign(n > 0 ? n - 1 : 0, 0);
        child_letter_.assign(children_.size(), 0);
        std::vector<index_t> fill(child_begin_.begin(), child_begin_.end() - 1);
        for (index_t v = 1; v < n; ++v) {
            const index_t p = shape_.parent[v];
            children_[fill[p]] = v;
            child_letter_[fill[p]] = label_letter(v, shape_.depth[p]);
            ++fill[p];
        }
    }

    std::vector<Symbol> text_;
    std::vector<index_t> sa_;
    detail::TrieShape shape_;
    std::vector<index_t> child_begin_;
    std::vector<NodeId> children_;
    std::vector<Symbol> child_letter_;
};

} // namespace ctxpat
