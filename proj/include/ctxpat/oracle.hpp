#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/mined_pattern.hpp"
#include "ctxpat/text.hpp"

// Brute-force references. Everything here scans the text directly and is only
// meant for small inputs.
namespace ctxpat::oracle {

inline constexpr index_t kMaxOracleLength = 5000;

inline void check_size(const Text& t) {
    if (t.size() > kMaxOracleLength) {
        throw ParameterError("oracle limited to texts of at most 5000 letters");
    }
}

// Flanks of the occurrence starting at 0-based position i, cut at the text ends.
inline ContextPair flanks_at(std::span<const Symbol> s, index_t i, index_t m, index_t l, index_t r) {
    const auto n = static_cast<index_t>(s.size());
    const index_t left_begin = i >= l ? i - l : 0;
    const index_t right_begin = i + m;
    const index_t right_end = std::min<index_t>(n, right_begin + r);
    return {Flank(s.begin() + left_begin, s.begin() + i), Flank(s.begin() + right_begin, s.begin() + right_end)};
}

inline bool occurs_at(std::span<const Symbol> s, std::span<const Symbol> p, index_t i) {
    return i + p.size() <= s.size() && std::equal(p.begin(), p.end(), s.begin() + i);
}

inline std::set<ContextPair> context_oracle(const Text& t, std::span<const Symbol> pattern, index_t l, index_t r) {
    check_size(t);
    if (pattern.empty()) {
        throw ParameterError("pattern must be non-empty");
    }
    const auto s = t.symbols();
    const auto m = static_cast<index_t>(pattern.size());
    std::set<ContextPair> out;
    for (index_t i = 0; i + m <= s.size(); ++i) {
        if (occurs_at(s, pattern, i)) {
            out.insert(flanks_at(s, i, m, l, r));
        }
    }
    return out;
}

/// Context sizes of every length-m substring over the alphabet, in one pass.
inline std::map<std::vector<Symbol>, std::size_t> context_size_table(const Text& t, index_t m, index_t l, index_t r) {
    check_size(t);
    const auto s = t.symbols();
    std::map<std::vector<Symbol>, std::set<ContextPair>> pairs;
    // The last window would contain the terminator.
    for (index_t i = 0; i + m < s.size(); ++i) {
        pairs[std::vector<Symbol>(s.begin() + i, s.begin() + i + m)].insert(flanks_at(s, i, m, l, r));
    }
    std::map<std::vector<Symbol>, std::size_t> out;
    for (const auto& [p, set] : pairs) {
        out.emplace(p, set.size());
    }
    return out;
}

inline std::vector<MinedPattern> cpm_oracle(const Text& t, index_t tau, index_t m, index_t l, index_t r) {
    check_size(t);
    if (tau == 0 || m == 0) {
        throw ParameterError("tau and m must be positive");
    }
    const auto s = t.symbols();
    std::map<std::vector<Symbol>, std::set<ContextPair>> pairs;
    for (index_t i = 0; i + m < s.size(); ++i) {
        pairs[std::vector<Symbol>(s.begin() + i, s.begin() + i + m)].insert(flanks_at(s, i, m, l, r));
    }
    std::vector<MinedPattern> out;
    for (auto& [p, set] : pairs) {
        if (set.size() >= tau) {
            out.push_back(MinedPattern{p, std::vector<ContextPair>(set.begin(), set.end())});
        }
    }
    return out;
}

} // namespace ctxpat::oracle
