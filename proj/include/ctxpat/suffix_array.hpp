#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/text.hpp"

namespace ctxpat {

namespace detail {

// Induced sorting (SA-IS). `s` holds values in [0, upper]; returns 0-based
// starting positions in lexicographic suffix order.
inline std::vector<std::int32_t> sa_is(std::span<const std::int32_t> s, std::int32_t upper) {
    const auto n = static_cast<std::int32_t>(s.size());
    if (n == 0) {
        return {};
    }
    if (n == 1) {
        return {0};
    }
    if (n < 16) {
        std::vector<std::int32_t> sa(n);
        for (std::int32_t i = 0; i < n; ++i) {
            sa[i] = i;
        }
        std::sort(sa.begin(), sa.end(), [&](std::int32_t a, std::int32_t b) {
            return std::lexicographical_compare(s.begin() + a, s.end(), s.begin() + b, s.end());
        });
        return sa;
    }

    std::vector<std::int32_t> sa(n);
    std::vector<bool> is_s(n, false);
    for (std::int32_t i = n - 2; i >= 0; --i) {
        is_s[i] = (s[i] == s[i + 1]) ? is_s[i + 1] : (s[i] < s[i + 1]);
    }

    // sum_l[c]: first slot of bucket c; sum_s[c]: first S-slot of bucket c.
    std::vector<std::int32_t> sum_l(upper + 1, 0), sum_s(upper + 1, 0);
    for (std::int32_t i = 0; i < n; ++i) {
        if (!is_s[i]) {
            ++sum_s[s[i]];
        } else if (s[i] < upper) {
            ++sum_l[s[i] + 1];
        }
    }
    for (std::int32_t c = 0; c <= upper; ++c) {
        sum_s[c] += sum_l[c];
        if (c < upper) {
            sum_l[c + 1] += sum_s[c];
        }
    }

    auto induce = [&](const std::vector<std::int32_t>& lms) {
        std::fill(sa.begin(), sa.end(), -1);
        std::vector<std::int32_t> buf(sum_s);
        for (std::int32_t d : lms) {
            if (d != n) {
                sa[buf[s[d]]++] = d;
            }
        }
        buf = sum_l;
        sa[buf[s[n - 1]]++] = n - 1;
        for (std::int32_t i = 0; i < n; ++i) {
            const std::int32_t v = sa[i];
            if (v >= 1 && !is_s[v - 1]) {
                sa[buf[s[v - 1]]++] = v - 1;
            }
        }
        buf = sum_l;
        for (std::int32_t i = n - 1; i >= 0; --i) {
            const std::int32_t v = sa[i];
            if (v >= 1 && is_s[v - 1]) {
                sa[--buf[s[v - 1] + 1]] = v - 1;
            }
        }
    };

    std::vector<std::int32_t> lms_map(n + 1, -1);
    std::vector<std::int32_t> lms;
    for (std::int32_t i = 1; i < n; ++i) {
        if (!is_s[i - 1] && is_s[i]) {
            lms_map[i] = static_cast<std::int32_t>(lms.size());
            lms.push_back(i);
        }
    }
    const auto m = static_cast<std::int32_t>(lms.size());

    induce(lms);

    if (m > 0) {
        std::vector<std::int32_t> sorted_lms;
        sorted_lms.reserve(m);
        for (std::int32_t v : sa) {
            if (lms_map[v] != -1) {
                sorted_lms.push_back(v);
            }
        }
        std::vector<std::int32_t> rec(m);
        std::int32_t rec_upper = 0;
        rec[lms_map[sorted_lms[0]]] = 0;
        for (std::int32_t i = 1; i < m; ++i) {
            std::int32_t l = sorted_lms[i - 1];
            std::int32_t r = sorted_lms[i];
            const std::int32_t end_l = (lms_map[l] + 1 < m) ? lms[lms_map[l] + 1] : n;
            const std::int32_t end_r = (lms_map[r] + 1 < m) ? lms[lms_map[r] + 1] : n;
            bool same = true;
            if (end_l - l != end_r - r) {
                same = false;
            } else {
                while (l < end_l && s[l] == s[r]) {
                    ++l;
                    ++r;
                }
                if (l == n || s[l] != s[r]) {
                    same = false;
                }
            }
            if (!same) {
                ++rec_upper;
            }
            rec[lms_map[sorted_lms[i]]] = rec_upper;
        }
        const auto rec_sa = sa_is(rec, rec_upper);
        for (std::int32_t i = 0; i < m; ++i) {
            sorted_lms[i] = lms[rec_sa[i]];
        }
        induce(sorted_lms);
    }
    return sa;
}

} // namespace detail

/// Suffix array; `pos[k]` is the 0-based start of the suffix with 0-based rank k.
struct SuffixArray {
    std::vector<index_t> pos;

    index_t size() const noexcept { return static_cast<index_t>(pos.size()); }
    /// SA[rank] with both sides 1-based.
    index_t at(index_t rank) const { return pos.at(rank - 1) + 1; }
    std::vector<index_t> one_based() const {
        std::vector<index_t> out(pos);
        for (auto& p : out) {
            ++p;
        }
        return out;
    }
};

/// `rank[p]` is the 0-based rank of the suffix starting at 0-based position p.
struct InverseSuffixArray {
    std::vector<index_t> rank;

    index_t size() const noexcept { return static_cast<index_t>(rank.size()); }
    index_t at(index_t position) const { return rank.at(position - 1) + 1; }
    std::vector<index_t> one_based() const {
        std::vector<index_t> out(rank);
        for (auto& r : out) {
            ++r;
        }
        return out;
    }
};

/// `lcp[k]` is the LCP of the suffixes with 0-based ranks k-1 and k; lcp[0] = 0.
struct LcpArray {
    std::vector<index_t> lcp;

    index_t size() const noexcept { return static_cast<index_t>(lcp.size()); }
    index_t at(index_t rank) const { return lcp.at(rank - 1); }
};

inline SuffixArray build_sa(std::span<const Symbol> text) {
    if (text.size() > kMaxTextLength) {
        throw InputError("text too long");
    }
    std::vector<std::int32_t> s(text.begin(), text.end());
    Symbol upper = 0;
    for (Symbol c : text) {
        upper = std::max(upper, c);
    }
    const auto sa = detail::sa_is(s, static_cast<std::int32_t>(upper));
    return SuffixArray{std::vector<index_t>(sa.begin(), sa.end())};
}

inline SuffixArray build_sa(const Text& t) { return build_sa(t.symbols()); }

inline InverseSuffixArray build_isa(const SuffixArray& sa) {
    InverseSuffixArray isa;
    isa.rank.assign(sa.size(), 0);
    for (index_t k = 0; k < sa.size(); ++k) {
        isa.rank[sa.pos[k]] = k;
    }
    return isa;
}

// Kasai et al.: walks text positions left to right, reusing h - 1 letters.
inline LcpArray build_lcp(std::span<const Symbol> text, const SuffixArray& sa, const InverseSuffixArray& isa) {
    const index_t n = sa.size();
    LcpArray out;
    out.lcp.assign(n, 0);
    index_t h = 0;
    for (index_t i = 0; i < n; ++i) {
        const index_t r = isa.rank[i];
        if (r == 0) {
            h = 0;
            continue;
        }
        const index_t j = sa.pos[r - 1];
        while (i + h < n && j + h < n && text[i + h] == text[j + h]) {
            ++h;
        }
        out.lcp[r] = h;
        if (h > 0) {
            --h;
        }
    }
    return out;
}

inline LcpArray build_lcp(std::span<const Symbol> text, const SuffixArray& sa) {
    return build_lcp(text, sa, build_isa(sa));
}

inline LcpArray build_lcp(const Text& t, const SuffixArray& sa) { return build_lcp(t.symbols(), sa); }

/// Sparse-table range minimum over a fixed array.
class RangeMin {
public:
    RangeMin() = default;

    explicit RangeMin(std::span<const index_t> values) {
        const std::size_t n = values.size();
        levels_.emplace_back(values.begin(), values.end());
        for (std::size_t w = 1; 2 * w <= n; w *= 2) {
            const auto& prev = levels_.back();
            std::vector<index_t> next(n - 2 * w + 1);
            for (std::size_t i = 0; i < next.size(); ++i) {
                next[i] = std::min(prev[i], prev[i + w]);
            }
            levels_.push_back(std::move(next));
        }
    }

    /// Minimum over the inclusive 0-based range [lo, hi].
    index_t min(std::size_t lo, std::size_t hi) const {
        const auto k = static_cast<std::size_t>(std::bit_width(hi - lo + 1) - 1);
        return std::min(levels_[k][lo], levels_[k][hi + 1 - (std::size_t{1} << k)]);
    }

private:
    std::vector<std::vector<index_t>> levels_;
};

/// Longest-common-extension queries in O(1) after linear-size preprocessing.
class LceIndex {
public:
    LceIndex() = default;

    LceIndex(const SuffixArray& sa, const LcpArray& lcp)
        : isa_(build_isa(sa)), rmq_(lcp.lcp), n_(sa.size()) {}

    LceIndex(InverseSuffixArray isa, const LcpArray& lcp)
        : isa_(std::move(isa)), rmq_(lcp.lcp), n_(isa_.size()) {}

    /// LCE of the suffixes starting at 1-based positions i and j.
    index_t lce(index_t i, index_t j) const {
        if (i == j) {
            return n_ - i + 1;
        }
        return lce_ranks(isa_.rank[i - 1], isa_.rank[j - 1]);
    }

    /// LCE of two suffixes given by 0-based ranks.
    index_t lce_ranks(index_t a, index_t b) const {
        if (a == b) {
            return kNone;
        }
        if (a > b) {
            std::swap(a, b);
        }
        return rmq_.min(a + 1, b);
    }

    const InverseSuffixArray& isa() const noexcept { return isa_; }

private:
    InverseSuffixArray isa_;
    RangeMin rmq_;
    index_t n_ = 0;
};

} // namespace ctxpat
