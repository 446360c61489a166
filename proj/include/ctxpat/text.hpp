#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxpat/common.hpp"

namespace ctxpat {

// Byte values chosen for the terminator and the gap marker when texts are
// written back out or recorded in file headers.
struct SentinelMap {
    unsigned char dollar = 0;
    unsigned char hash = 1;

    friend bool operator==(const SentinelMap&, const SentinelMap&) = default;
};

enum class SentinelPolicy { append_if_missing, require_present };

struct LoadOptions {
    SentinelPolicy policy = SentinelPolicy::append_if_missing;
    // Unset: the smallest byte value absent from the input (append), or the
    // file's last byte (require_present).
    std::optional<unsigned char> dollar;
    std::optional<unsigned char> hash;
};

/// A terminated text. Letter i (1-based) for i < n is a payload byte; letter n
/// is the unique terminator, which compares below every other letter.
class Text {
public:
    Text() = default;

    static Text from_bytes(std::string_view raw, const LoadOptions& opts = {}) {
        if (raw.empty()) {
            throw InputError("empty input");
        }
        std::array<bool, 256> present{};
        for (unsigned char c : raw) {
            present[c] = true;
        }

        unsigned char dollar = 0;
        std::string_view payload = raw;
        if (opts.policy == SentinelPolicy::require_present) {
            dollar = opts.dollar.value_or(static_cast<unsigned char>(raw.back()));
            if (static_cast<unsigned char>(raw.back()) != dollar) {
                throw InputError("input does not end with the terminator byte");
            }
            payload.remove_suffix(1);
            if (payload.find(static_cast<char>(dollar)) != std::string_view::npos) {
                throw InputError("sentinel collision: terminator byte occurs inside the text");
            }
        } else if (opts.dollar) {
            dollar = *opts.dollar;
            if (static_cast<unsigned char>(raw.back()) == dollar) {
                payload.remove_suffix(1);
            }
            if (payload.find(static_cast<char>(dollar)) != std::string_view::npos) {
                throw InputError("sentinel collision: terminator byte occurs inside the text");
            }
        } else {
            auto free = first_absent(present, std::nullopt);
            if (!free) {
                throw InputError("sentinel collision: every byte value occurs in the input");
            }
            dollar = *free;
        }
        if (payload.empty()) {
            throw InputError("empty input");
        }
        if (payload.size() > kMaxTextLength - 1) {
            throw InputError("input too long");
        }

        std::array<bool, 256> in_payload{};
        for (unsigned char c : payload) {
            in_payload[c] = true;
        }
        unsigned char hash = 0;
        if (opts.hash) {
            hash = *opts.hash;
            if (in_payload[hash]) {
                throw InputError("sentinel collision: gap byte occurs inside the text");
            }
        } else {
            auto free = first_absent(in_payload, dollar);
            if (!free) {
                throw InputError("sentinel collision: no byte value left for the gap marker");
            }
            hash = *free;
        }
        if (hash == dollar) {
            throw InputError("terminator and gap marker must differ");
        }

        std::vector<Symbol> data;
        data.reserve(payload.size() + 1);
        for (unsigned char c : payload) {
            data.push_back(symbol_of(c));
        }
        data.push_back(kDollar);
        return Text(std::move(data), SentinelMap{dollar, hash});
    }

    /// Wraps an already encoded sequence. `symbols` must end with the only
    /// kDollar it contains; kHash letters are allowed (modified strings).
    static Text from_symbols(std::vector<Symbol> symbols, SentinelMap sentinels) {
        if (symbols.size() < 2) {
            throw InputError("empty input");
        }
        if (symbols.back() != kDollar ||
            std::find(symbols.begin(), symbols.end() - 1, kDollar) != symbols.end() - 1) {
            throw InputError("terminator must occur exactly once, at the end");
        }
        for (Symbol s : symbols) {
            if (s > kSymbolUpper) {
                throw InputError("symbol outside the byte alphabet");
            }
        }
        return Text(std::move(symbols), sentinels);
    }

    index_t size() const noexcept { return static_cast<index_t>(data_.size()); }

    /// 1-based letter access.
    Symbol letter(index_t i) const { return data_.at(i - 1); }

    std::span<const Symbol> symbols() const noexcept { return data_; }
    std::span<const Symbol> payload() const noexcept { return std::span(data_).first(data_.size() - 1); }
    const std::vector<Symbol>& alphabet() const noexcept { return alphabet_; }
    SentinelMap sentinels() const noexcept { return sentinels_; }

    bool operator==(const Text& other) const { return data_ == other.data_; }

private:
    Text(std::vector<Symbol> data, SentinelMap sentinels) : data_(std::move(data)), sentinels_(sentinels) {
        std::array<bool, kSymbolUpper + 1> seen{};
        for (Symbol s : data_) {
            if (is_letter(s)) {
                seen[s] = true;
            }
        }
        for (Symbol s = kFirstLetter; s <= kSymbolUpper; ++s) {
            if (seen[s]) {
                alphabet_.push_back(s);
            }
        }
    }

    static std::optional<unsigned char> first_absent(const std::array<bool, 256>& present,
                                                     std::optional<unsigned char> skip) {
        for (unsigned v = 0; v < 256; ++v) {
            if (!present[v] && (!skip || *skip != v)) {
                return static_cast<unsigned char>(v);
            }
        }
        return std::nullopt;
    }

    std::vector<Symbol> data_;
    std::vector<Symbol> alphabet_;
    SentinelMap sentinels_;
};

inline Text load_text(const std::string& path, const LoadOptions& opts = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed: " + path);
    }
    return Text::from_bytes(raw, opts);
}

inline Text reverse_text(const Text& t) {
    std::vector<Symbol> data(t.payload().rbegin(), t.payload().rend());
    data.push_back(kDollar);
    return Text::from_symbols(std::move(data), t.sentinels());
}

inline std::vector<Symbol> encode(std::string_view bytes) {
    std::vector<Symbol> out;
    out.reserve(bytes.size());
    for (unsigned char c : bytes) {
        out.push_back(symbol_of(c));
    }
    return out;
}

/// Printable form used by every text output: sentinels become '$' and '#',
/// the empty string becomes "-".
inline std::string render(std::span<const Symbol> s) {
    if (s.empty()) {
        return "-";
    }
    std::string out;
    out.reserve(s.size());
    for (Symbol c : s) {
        if (c == kDollar) {
            out.push_back('$');
        } else if (c == kHash) {
            out.push_back('#');
        } else {
            out.push_back(static_cast<char>(byte_of(c)));
        }
    }
    return out;
}

} // namespace ctxpat
