#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/heavy_path.hpp"
#include "ctxpat/lz77.hpp"
#include "ctxpat/prefix_tree.hpp"
#include "ctxpat/range_counter.hpp"
#include "ctxpat/serialize.hpp"
#include "ctxpat/suffix_array.hpp"
#include "ctxpat/suffix_tree.hpp"
#include "ctxpat/text.hpp"

namespace ctxpat {

enum class IndexKind : std::uint32_t { heavy_path = 1, optimized = 2, simple = 3 };

struct QueryBreakdown {
    std::uint64_t q1 = 0; // type-1 points (D1)
    std::uint64_t q2 = 0; // type-2 points (D2)
    std::uint64_t q3 = 0; // type-3 points of the locus' light ancestor
    bool found = false;
    bool heavy = false;

    std::uint64_t total() const noexcept { return q1 + q2 + q3; }
};

struct IndexStats {
    index_t text_length = 0;    // letters of the original text, terminator included
    index_t indexed_length = 0; // letters actually indexed (|T'| for optimized indexes)
    index_t phrases = 0;        // LZ77 phrase count (optimized indexes)
    index_t nodes = 0;
    index_t light_nodes = 0;
    index_t max_light_per_path = 0;
    std::uint64_t d1_points = 0;
    std::uint64_t d2_points = 0;
    std::uint64_t d3_points = 0;
    std::uint64_t distinct_points = 0;

    std::uint64_t total_points() const noexcept { return d1_points + d2_points + d3_points; }
    /// 4 n (floor(log2 n) + 1) for the indexed length n.
    std::uint64_t point_budget() const noexcept {
        const std::uint64_t n = indexed_length;
        return 4 * n * static_cast<std::uint64_t>(std::bit_width(n));
    }
};

/// Counts |C_T(P, l, r)| for arbitrary patterns and flank lengths.
class CpcIndex {
public:
    CpcIndex() = default;

    IndexKind kind() const noexcept { return kind_; }
    std::optional<index_t> bound() const noexcept { return bound_; }
    const SuffixTree& tree() const noexcept { return st_; }
    const HeavyPathDecomposition& decomposition() const noexcept { return hpd_; }
    SentinelMap sentinels() const noexcept { return sentinels_; }

    IndexStats stats() const {
        IndexStats s;
        s.text_length = text_length_;
        s.indexed_length = st_.text_size();
        s.phrases = phrases_;
        s.nodes = st_.node_count();
        s.light_nodes = static_cast<index_t>(hpd_.light_nodes.size());
        s.max_light_per_path = kind_ == IndexKind::simple ? 0 : max_light_depth(st_, hpd_);
        s.d1_points = d1_.size();
        s.d2_points = d2_.size();
        s.d3_points = forest_.point_count();
        s.distinct_points = d1_.distinct_size() + d2_.distinct_size() + forest_.distinct_point_count();
        return s;
    }

    std::uint64_t query(std::span<const Symbol> pattern, index_t l, index_t r) const {
        return query_breakdown(pattern, l, r).total();
    }

    std::uint64_t query(std::string_view pattern, index_t l, index_t r) const {
        const auto p = encode(pattern);
        return query(p, l, r);
    }

    QueryBreakdown query_breakdown(std::span<const Symbol> pattern, index_t l, index_t r) const {
        if (pattern.empty()) {
            throw ParameterError("pattern must be non-empty");
        }
        const auto m = static_cast<std::uint64_t>(pattern.size());
        if (bound_ && m + l + r > *bound_) {
            throw BoundExceeded("l + |P| + r = " + std::to_string(m + l + r) + " exceeds the index bound " +
                                std::to_string(*bound_));
        }
        QueryBreakdown out;
        for (Symbol c : pattern) {
            if (!is_letter(c)) {
                return out;
            }
        }
        const auto locus = st_.locus(pattern);
        if (!locus) {
            return out;
        }
        out.found = true;
        const index_t u = *locus;
        const index_t n = st_.text_size();
        const auto mr = static_cast<coord_t>(std::min<std::uint64_t>(m + r, n));
        const auto lc = static_cast<coord_t>(std::min<index_t>(l, n));
        const Rect<5> rect{Interval::between(st_.preorder(u), st_.preorder(st_.rleaf(u))), Interval::at_most(mr),
                           Interval::at_least(mr), Interval::at_most(lc), Interval::at_least(lc)};
        out.q1 = d1_.count(rect);
        if (kind_ == IndexKind::simple) {
            return out;
        }
        out.q2 = d2_.count(rect);
        if (!hpd_.is_light(u)) {
            out.heavy = true;
            const index_t ul = hpd_.head[u];
            out.q3 = forest_.count(group_of(ul), {Interval::at_most(lc), Interval::at_least(lc),
                                                  Interval::at_least(mr)});
        }
        return out;
    }

    std::string serialize() const;
    static CpcIndex deserialize(std::string_view bytes);

    friend CpcIndex build_index(const Text& t);
    friend CpcIndex build_optimized_index(const Text& t, index_t bound);
    friend CpcIndex build_simple_index(const Text& t, std::uint64_t max_points);

private:
    index_t group_of(index_t light) const {
        const auto it = std::lower_bound(hpd_.light_nodes.begin(), hpd_.light_nodes.end(), light);
        return static_cast<index_t>(it - hpd_.light_nodes.begin());
    }

    static CpcIndex build_heavy_path(std::span<const Symbol> symbols, bool truncated);

    IndexKind kind_ = IndexKind::heavy_path;
    std::optional<index_t> bound_;
    index_t text_length_ = 0;
    index_t phrases_ = 0;
    SentinelMap sentinels_;
    SuffixTree st_;
    HeavyPathDecomposition hpd_;
    RangeCounter<5> d1_;
    RangeCounter<5> d2_;
    RangeCounterForest<3> forest_;
};

inline CpcIndex CpcIndex::build_heavy_path(std::span<const Symbol> symbols, bool truncated) {
    CpcIndex idx;
    std::vector<index_t> forward_gap;
    {
        const auto sa = build_sa(symbols);
        const auto lcp = build_lcp(symbols, sa);
        idx.st_ = truncated ? SuffixTree::build_truncated(symbols, sa, lcp) : SuffixTree::build(symbols, sa, lcp);
    }
    if (truncated) {
        forward_gap = SuffixTree::gap_distances(symbols);
    }
    const SuffixTree& st = idx.st_;
    idx.hpd_ = decompose(st);
    const ReverseIndex rev = make_reverse_index(symbols);

    std::vector<Point<5>> type1, type2;
    PrefixTreeOptions opt;
    opt.hpd = &idx.hpd_;
    opt.forward_gap = forward_gap;
    for (index_t ul : idx.hpd_.light_nodes) {
        const PrefixTree pt = build_prefix_tree(st, rev, ul, opt);
        const coord_t pre = st.preorder(ul);
        const coord_t sd_u = st.string_depth(ul);
        const coord_t sd_pu = ul == st.root() ? 0 : st.string_depth(st.parent(ul)) + 1;
        std::vector<Point<3>> type3;
        type3.reserve(pt.size());
        for (index_t v = 0; v < pt.size(); ++v) {
            const coord_t lo = pt.parent_depth_plus_one(v);
            const coord_t sd_v = pt.shape.depth[v];
            type1.push_back({pre, sd_pu, sd_u, lo, sd_v});
            type2.push_back({pre, sd_u + 1, pt.phi[v], lo, sd_v});
            type3.push_back({lo, sd_v, pt.phi[v]});
        }
        idx.forest_.add_group(std::move(type3));
    }
    idx.d1_ = RangeCounter<5>(std::move(type1));
    idx.d2_ = RangeCounter<5>(std::move(type2));
    return idx;
}

inline CpcIndex build_index(const Text& t) {
    CpcIndex idx = CpcIndex::build_heavy_path(t.symbols(), false);
    idx.kind_ = IndexKind::heavy_path;
    idx.text_length_ = t.size();
    idx.sentinels_ = t.sentinels();
    return idx;
}

/// Index over the modified string T' for queries with l + |P| + r <= bound.
inline CpcIndex build_optimized_index(const Text& t, index_t bound) {
    if (bound == 0) {
        throw ParameterError("bound must be positive");
    }
    const auto f = factorize(t);
    const auto ms = build_modified_string(t, f, bound);
    CpcIndex idx = CpcIndex::build_heavy_path(ms.symbols, true);
    idx.kind_ = IndexKind::optimized;
    idx.bound_ = bound;
    idx.text_length_ = t.size();
    idx.phrases_ = f.z();
    idx.sentinels_ = t.sentinels();
    return idx;
}

inline constexpr std::uint64_t kSimpleIndexMaxPoints = std::uint64_t{1} << 24;

/// Reference index with one point per (suffix-tree node, prefix-tree node)
/// pair. Quadratic; refuses inputs that would exceed `max_points`.
inline CpcIndex build_simple_index(const Text& t, std::uint64_t max_points = kSimpleIndexMaxPoints) {
    CpcIndex idx;
    idx.kind_ = IndexKind::simple;
    idx.text_length_ = t.size();
    idx.sentinels_ = t.sentinels();
    const auto symbols = t.symbols();
    {
        const auto sa = build_sa(symbols);
        const auto lcp = build_lcp(symbols, sa);
        idx.st_ = SuffixTree::build(symbols, sa, lcp);
    }
    const SuffixTree& st = idx.st_;
    std::uint64_t estimate = 0;
    for (index_t u = 0; u < st.node_count(); ++u) {
        estimate += 2 * std::uint64_t{st.leaf_count(u)};
    }
    if (estimate > max_points) {
        throw ParameterError("text too long for the simple index (" + std::to_string(estimate) +
                             " points exceed the limit of " + std::to_string(max_points) + ")");
    }
    const ReverseIndex rev = make_reverse_index(symbols);
    std::vector<Point<5>> points;
    for (index_t u = 0; u < st.node_count(); ++u) {
        const PrefixTree pt = build_prefix_tree(st, rev, u);
        const coord_t pre = st.preorder(u);
        const coord_t sd_pu = u == st.root() ? 0 : st.string_depth(st.parent(u)) + 1;
        const coord_t sd_u = st.string_depth(u);
        for (index_t v = 0; v < pt.size(); ++v) {
            points.push_back({pre, sd_pu, sd_u, pt.parent_depth_plus_one(v), pt.shape.depth[v]});
        }
    }
    idx.d1_ = RangeCounter<5>(std::move(points));
    return idx;
}

inline constexpr char kIndexMagic[8] = {'C', 'T', 'X', 'P', 'I', 'D', 'X', '\0'};
inline constexpr std::uint32_t kIndexVersion = 1;

inline std::string CpcIndex::serialize() const {
    BinaryWriter payload;
    st_.write(payload);
    hpd_.write(payload);
    d1_.write(payload);
    d2_.write(payload);
    forest_.write(payload);

    BinaryWriter out;
    out.put_bytes(std::string_view(kIndexMagic, 8));
    out.put<std::uint32_t>(kIndexVersion);
    out.put<std::uint32_t>(static_cast<std::uint32_t>(kind_));
    out.put<std::uint64_t>(text_length_);
    out.put<std::uint64_t>(st_.text_size());
    out.put<std::uint64_t>(phrases_);
    out.put<std::uint64_t>(bound_.value_or(0));
    out.put<std::uint8_t>(sentinels_.dollar);
    out.put<std::uint8_t>(sentinels_.hash);
    out.put<std::uint32_t>(crc32_of(out.bytes()));
    out.put<std::uint64_t>(payload.bytes().size());
    out.put_bytes(payload.bytes());
    out.put<std::uint32_t>(crc32_of(payload.bytes()));
    return out.take();
}

inline CpcIndex CpcIndex::deserialize(std::string_view bytes) {
    BinaryReader in(bytes);
    if (in.get_bytes(8) != std::string_view(kIndexMagic, 8)) {
        throw FormatError("not an index file");
    }
    const auto version = in.get<std::uint32_t>();
    if (version != kIndexVersion) {
        throw FormatError("unsupported index version " + std::to_string(version));
    }
    CpcIndex idx;
    const auto kind = in.get<std::uint32_t>();
    if (kind < 1 || kind > 3) {
        throw FormatError("corrupt index header: unknown kind");
    }
    idx.kind_ = static_cast<IndexKind>(kind);
    const auto text_length = in.get<std::uint64_t>();
    const auto indexed_length = in.get<std::uint64_t>();
    const auto phrases = in.get<std::uint64_t>();
    const auto bound = in.get<std::uint64_t>();
    idx.sentinels_.dollar = in.get<std::uint8_t>();
    idx.sentinels_.hash = in.get<std::uint8_t>();
    const auto header_end = in.position();
    if (in.get<std::uint32_t>() != crc32_of(bytes.substr(0, header_end))) {
        throw FormatError("index header checksum mismatch");
    }
    if (text_length > kMaxTextLength || indexed_length > kMaxTextLength || phrases > kMaxTextLength ||
        bound > kMaxTextLength) {
        throw FormatError("corrupt index header");
    }
    idx.text_length_ = static_cast<index_t>(text_length);
    idx.phrases_ = static_cast<index_t>(phrases);
    if (bound != 0) {
        idx.bound_ = static_cast<index_t>(bound);
    }
    const auto size = in.get<std::uint64_t>();
    const auto payload_bytes = in.get_bytes(static_cast<std::size_t>(std::min<std::uint64_t>(size, bytes.size())));
    if (in.get<std::uint32_t>() != crc32_of(payload_bytes)) {
        throw FormatError("index payload checksum mismatch");
    }
    if (!in.at_end()) {
        throw FormatError("trailing bytes after index payload");
    }

    BinaryReader payload(payload_bytes);
    idx.st_ = SuffixTree::read(payload);
    // The simple index stores no decomposition.
    idx.hpd_ = HeavyPathDecomposition::read(payload, idx.kind_ == IndexKind::simple ? 0 : idx.st_.node_count());
    idx.d1_ = RangeCounter<5>::read(payload);
    idx.d2_ = RangeCounter<5>::read(payload);
    idx.forest_ = RangeCounterForest<3>::read(payload);
    if (!payload.at_end() || idx.st_.text_size() != indexed_length) {
        throw FormatError("corrupt index payload");
    }
    if (idx.kind_ != IndexKind::simple && idx.forest_.group_count() != idx.hpd_.light_nodes.size()) {
        throw FormatError("corrupt index payload: counter table does not match the light nodes");
    }
    return idx;
}

inline void save_index(const CpcIndex& idx, const std::string& path) {
    const std::string bytes = idx.serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

inline CpcIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open index " + path);
    }
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return CpcIndex::deserialize(bytes);
}

} // namespace ctxpat
