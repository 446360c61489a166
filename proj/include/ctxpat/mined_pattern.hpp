#pragma once

#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/text.hpp"

namespace ctxpat {

using Flank = std::vector<Symbol>;
using ContextPair = std::pair<Flank, Flank>;

struct MinedPattern {
    std::vector<Symbol> pattern;
    std::vector<ContextPair> contexts; // sorted by (L, R)

    std::size_t context_size() const noexcept { return contexts.size(); }

    friend bool operator==(const MinedPattern&, const MinedPattern&) = default;
};

inline void write_pattern_header(std::ostream& out, std::span<const Symbol> pattern, std::size_t size) {
    out << render(pattern) << '\t' << size << '\n';
}

inline void write_context_line(std::ostream& out, std::span<const Symbol> left, std::span<const Symbol> right) {
    out << '\t' << render(left) << '\t' << render(right) << '\n';
}

inline void write_patterns(std::ostream& out, const std::vector<MinedPattern>& patterns) {
    for (const auto& p : patterns) {
        write_pattern_header(out, p.pattern, p.context_size());
        for (const auto& [left, right] : p.contexts) {
            write_context_line(out, left, right);
        }
    }
}

} // namespace ctxpat
