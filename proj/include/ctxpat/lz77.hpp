#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/suffix_array.hpp"
#include "ctxpat/text.hpp"

namespace ctxpat {

struct Lz77Factorization {
    std::vector<index_t> starts; // 1-based, strictly increasing, starts[0] = 1

    index_t z() const noexcept { return static_cast<index_t>(starts.size()); }
};

// Greedy factorization: the longest previous occurrence of the suffix at i
// starts at the closest smaller text position on either side of i in the
// suffix array.
inline Lz77Factorization factorize(std::span<const Symbol> s) {
    Lz77Factorization f;
    const auto n = static_cast<index_t>(s.size());
    if (n == 0) {
        return f;
    }
    const auto sa = build_sa(s);
    auto isa = build_isa(sa);
    const auto lcp = build_lcp(s, sa, isa);

    std::vector<index_t> psv(n, kNone), nsv(n, kNone);
    std::vector<index_t> stack;
    for (index_t k = 0; k < n; ++k) {
        while (!stack.empty() && sa.pos[stack.back()] > sa.pos[k]) {
            nsv[stack.back()] = k;
            stack.pop_back();
        }
        psv[k] = stack.empty() ? kNone : stack.back();
        stack.push_back(k);
    }
    const LceIndex lce(std::move(isa), lcp);

    index_t i = 0;
    while (i < n) {
        f.starts.push_back(i + 1);
        const index_t k = lce.isa().rank[i];
        index_t len = 0;
        if (psv[k] != kNone) {
            len = std::max(len, lce.lce_ranks(psv[k], k));
        }
        if (nsv[k] != kNone) {
            len = std::max(len, lce.lce_ranks(nsv[k], k));
        }
        i += std::max<index_t>(len, 1);
    }
    return f;
}

inline Lz77Factorization factorize(const Text& t) { return factorize(t.symbols()); }

struct ModifiedString {
    std::vector<Symbol> symbols;
    std::vector<index_t> source_map; // 1-based source position; kNone for markers

    index_t size() const noexcept { return static_cast<index_t>(symbols.size()); }
};

/// Keeps the letters within distance < B of a phrase start and writes one
/// kHash for every maximal run of dropped positions.
inline ModifiedString build_modified_string(std::span<const Symbol> t, std::span<const index_t> starts,
                                            index_t bound) {
    if (bound == 0) {
        throw ParameterError("bound must be positive");
    }
    ModifiedString out;
    const auto n = static_cast<index_t>(t.size());
    std::size_t next = 0; // first start >= current position
    bool in_gap = false;
    for (index_t i = 1; i <= n; ++i) {
        while (next < starts.size() && starts[next] < i) {
            ++next;
        }
        index_t dist = kNone;
        if (next < starts.size()) {
            dist = starts[next] - i;
        }
        if (next > 0) {
            dist = std::min(dist, i - starts[next - 1]);
        }
        if (dist < bound) {
            out.symbols.push_back(t[i - 1]);
            out.source_map.push_back(i);
            in_gap = false;
        } else if (!in_gap) {
            out.symbols.push_back(kHash);
            out.source_map.push_back(kNone);
            in_gap = true;
        }
    }
    return out;
}

/// Appends a terminator when the string does not already end with one. A text
/// ending in kDollar is its own last phrase start, so this only fires for raw
/// inputs that end inside a gap.
inline void ensure_terminated(ModifiedString& ms) {
    if (ms.symbols.empty() || ms.symbols.back() != kDollar) {
        ms.symbols.push_back(kDollar);
        ms.source_map.push_back(kNone);
    }
}

inline ModifiedString build_modified_string(const Text& t, const Lz77Factorization& f, index_t bound) {
    auto ms = build_modified_string(t.symbols(), f.starts, bound);
    ensure_terminated(ms);
    return ms;
}

} // namespace ctxpat
