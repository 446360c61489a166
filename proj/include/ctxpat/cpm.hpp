#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/mined_pattern.hpp"
#include "ctxpat/suffix_array.hpp"
#include "ctxpat/text.hpp"

namespace ctxpat {

struct CpmParams {
    index_t tau = 1;
    index_t m = 1;
    index_t l = 0;
    index_t r = 0;

    /// Throws ParameterError unless the parameters fit a text of n letters.
    void validate(index_t n) const {
        if (tau == 0) {
            throw ParameterError("tau must be positive");
        }
        if (m == 0) {
            throw ParameterError("m must be positive");
        }
        if (static_cast<std::uint64_t>(m) + r > n) {
            throw ParameterError("m + r exceeds the text length");
        }
        if (l >= n) {
            throw ParameterError("l must be smaller than the text length");
        }
    }
};

// 1-based positions and ranks; ids are 1-based and dense.
struct Tuple4 {
    index_t pos, rank, int_id, sint_id;
};

struct Tuple2 {
    index_t pos, rint_id;
};

struct Tuple5 {
    index_t pos, rank, int_id, sint_id, rint_id;
};

/// Ids of the maximal rank runs whose suffixes share a prefix of `depth`
/// letters, numbered from 1 in rank order.
inline std::vector<index_t> partition_intervals(std::span<const index_t> lcp, index_t depth) {
    std::vector<index_t> ids(lcp.size());
    index_t id = 0;
    for (std::size_t k = 0; k < lcp.size(); ++k) {
        if (k == 0 || lcp[k] < depth) {
            ++id;
        }
        ids[k] = id;
    }
    return ids;
}

/// Suffix structures of T and of its reverse.
struct CpmPhase1 {
    std::vector<Symbol> text;
    SuffixArray sa;
    InverseSuffixArray isa;
    LcpArray lcp;
    SuffixArray sa_rev;
    LcpArray lcp_rev;

    index_t n() const noexcept { return static_cast<index_t>(text.size()); }
};

inline CpmPhase1 cpm_phase1(const Text& t) {
    CpmPhase1 p;
    p.text.assign(t.symbols().begin(), t.symbols().end());
    p.sa = build_sa(t);
    p.isa = build_isa(p.sa);
    p.lcp = build_lcp(t.symbols(), p.sa, p.isa);
    const Text rev = reverse_text(t);
    p.sa_rev = build_sa(rev);
    p.lcp_rev = build_lcp(rev, p.sa_rev);
    return p;
}

/// Sort key for left flanks: comparing keys compares the flanks
/// T[max(1, p-l) .. p-1] as strings. Indexed by p - 1.
///
/// A full flank starting at s maps to the first rank of its depth-l interval;
/// a flank cut short by the text start is a prefix of T and maps to the first
/// rank of the interval of suffix 1 at its own length, placed before the full
/// flanks of that interval and ordered by length.
inline std::vector<std::uint64_t> left_flank_keys(const InverseSuffixArray& isa, const LcpArray& lcp, index_t l) {
    const index_t n = isa.size();
    std::vector<index_t> start_l(n);
    for (index_t k = 0; k < n; ++k) {
        start_l[k] = (k == 0 || lcp.lcp[k] < l) ? k : start_l[k - 1];
    }
    const index_t r1 = isa.rank[0];
    const index_t short_max = std::min(l, n);
    std::vector<index_t> start_prefix(short_max, 0);
    index_t k = r1;
    index_t mn = kNone;
    for (index_t d = short_max; d-- > 1;) {
        while (k >= 1 && std::min(mn, lcp.lcp[k]) >= d) {
            mn = std::min(mn, lcp.lcp[k]);
            --k;
        }
        start_prefix[d] = k;
    }

    std::vector<std::uint64_t> keys(n);
    for (index_t p = 1; p <= n; ++p) {
        const index_t len = p - 1;
        if (len >= l) {
            const index_t s = p - l;
            keys[p - 1] = (std::uint64_t{start_l[isa.rank[s - 1]]} << 33) | (std::uint64_t{1} << 32);
        } else {
            keys[p - 1] = (std::uint64_t{start_prefix[len]} << 33) | len;
        }
    }
    return keys;
}

namespace detail {

// Stable LSD radix sort on a 64-bit key, 16 bits per pass; passes above the
// largest key are skipped.
template <typename T, typename Key>
void radix_sort(std::vector<T>& items, Key key) {
    std::uint64_t max_key = 0;
    for (const auto& x : items) {
        max_key = std::max<std::uint64_t>(max_key, key(x));
    }
    std::vector<T> buf(items.size());
    std::vector<std::size_t> count(1 << 16);
    for (unsigned shift = 0; shift < 64 && (max_key >> shift) != 0; shift += 16) {
        std::fill(count.begin(), count.end(), 0);
        for (const auto& x : items) {
            ++count[(key(x) >> shift) & 0xFFFF];
        }
        std::size_t sum = 0;
        for (auto& c : count) {
            const std::size_t here = c;
            c = sum;
            sum += here;
        }
        for (const auto& x : items) {
            buf[count[(key(x) >> shift) & 0xFFFF]++] = x;
        }
        items.swap(buf);
    }
}

inline Flank slice(std::span<const Symbol> s, index_t begin, index_t end) {
    return Flank(s.begin() + begin, s.begin() + end);
}

} // namespace detail

/// Phases 2-4: interval ids at depths m and m + r over T, and at depth l over
/// the reverse text.
inline std::pair<std::vector<Tuple4>, std::vector<Tuple2>> phase2_to_4(const CpmPhase1& p1, const CpmParams& prm) {
    prm.validate(p1.n());
    const index_t n = p1.n();
    const auto int_id = partition_intervals(p1.lcp.lcp, prm.m);
    const auto sint_id = partition_intervals(p1.lcp.lcp, prm.m + prm.r);
    const auto rint_id = partition_intervals(p1.lcp_rev.lcp, prm.l);
    std::vector<Tuple4> t4(n);
    std::vector<Tuple2> t2(n);
    for (index_t i = 0; i < n; ++i) {
        t4[i] = Tuple4{p1.sa.pos[i] + 1, i + 1, int_id[i], sint_id[i]};
        // Reverse suffix q reads the letters before forward position n + 1 - q.
        t2[i] = Tuple2{n - p1.sa_rev.pos[i], rint_id[i]};
    }
    return {std::move(t4), std::move(t2)};
}

/// Phase 5: joins both streams (each sorted by position) on the window start,
/// keeping windows whose m letters avoid the terminator.
inline std::vector<Tuple5> phase5_merge(std::span<const Tuple4> t4, std::span<const Tuple2> t2, index_t n,
                                        index_t m) {
    std::vector<Tuple5> out;
    std::size_t b = 0;
    for (const auto& a : t4) {
        if (a.pos + m > n) {
            continue;
        }
        while (b < t2.size() && t2[b].pos < a.pos) {
            ++b;
        }
        if (b == t2.size() || t2[b].pos != a.pos) {
            throw Error("phase 5 alignment mismatch at position " + std::to_string(a.pos));
        }
        out.push_back(Tuple5{a.pos, a.rank, a.int_id, a.sint_id, t2[b].rint_id});
    }
    return out;
}

/// Phase 6: counts distinct (sint, rint) pairs per interval and emits the
/// patterns reaching tau. `left_keys` comes from left_flank_keys.
inline std::vector<MinedPattern> phase6_count_emit(std::vector<Tuple5> t5, std::span<const Symbol> text,
                                                   std::span<const std::uint64_t> left_keys, const CpmParams& prm) {
    const auto n = static_cast<index_t>(text.size());
    detail::radix_sort(t5, [](const Tuple5& x) { return x.rint_id; });
    detail::radix_sort(t5, [](const Tuple5& x) { return x.sint_id; });
    detail::radix_sort(t5, [](const Tuple5& x) { return x.int_id; });

    struct Pair {
        std::uint64_t lkey;
        index_t int_id, sint_id, pos;
    };
    std::vector<Pair> pairs;
    for (std::size_t a = 0; a < t5.size();) {
        std::size_t b = a;
        std::size_t distinct = 0;
        while (b < t5.size() && t5[b].int_id == t5[a].int_id) {
            if (b == a || t5[b].sint_id != t5[b - 1].sint_id || t5[b].rint_id != t5[b - 1].rint_id) {
                ++distinct;
            }
            ++b;
        }
        if (distinct >= prm.tau) {
            for (std::size_t k = a; k < b; ++k) {
                if (k == a || t5[k].sint_id != t5[k - 1].sint_id || t5[k].rint_id != t5[k - 1].rint_id) {
                    pairs.push_back(Pair{left_keys[t5[k].pos - 1], t5[k].int_id, t5[k].sint_id, t5[k].pos});
                }
            }
        }
        a = b;
    }
    detail::radix_sort(pairs, [](const Pair& x) { return x.sint_id; });
    detail::radix_sort(pairs, [](const Pair& x) { return x.lkey; });
    detail::radix_sort(pairs, [](const Pair& x) { return x.int_id; });

    std::vector<MinedPattern> out;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const index_t p0 = pairs[k].pos - 1;
        if (k == 0 || pairs[k].int_id != pairs[k - 1].int_id) {
            out.push_back(MinedPattern{detail::slice(text, p0, p0 + prm.m), {}});
        }
        const index_t left_begin = p0 >= prm.l ? p0 - prm.l : 0;
        const index_t right_end = std::min<index_t>(n, p0 + prm.m + prm.r);
        out.back().contexts.emplace_back(detail::slice(text, left_begin, p0),
                                         detail::slice(text, p0 + prm.m, right_end));
    }
    return out;
}

/// In-memory miner: all phases with radix sorting.
inline std::vector<MinedPattern> mine_im(const Text& t, const CpmParams& prm) {
    prm.validate(t.size());
    const auto p1 = cpm_phase1(t);
    auto [t4, t2] = phase2_to_4(p1, prm);
    detail::radix_sort(t4, [](const Tuple4& x) { return x.pos; });
    detail::radix_sort(t2, [](const Tuple2& x) { return x.pos; });
    auto t5 = phase5_merge(t4, t2, p1.n(), prm.m);
    const auto keys = left_flank_keys(p1.isa, p1.lcp, prm.l);
    return phase6_count_emit(std::move(t5), p1.text, keys, prm);
}

} // namespace ctxpat
