#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ctxpat {

// Text positions, ranks and string depths. Texts are limited to < 2^31 letters.
using index_t = std::uint32_t;

// Internal letter code. Byte b is stored as b + kFirstLetter so that both
// sentinels sort below every real letter.
using Symbol = std::uint32_t;

inline constexpr Symbol kDollar = 0;
inline constexpr Symbol kHash = 1;
inline constexpr Symbol kFirstLetter = 2;
inline constexpr Symbol kSymbolUpper = kFirstLetter + 255;

inline constexpr index_t kMaxTextLength = (index_t{1} << 31) - 2;
inline constexpr index_t kNone = std::numeric_limits<index_t>::max();

constexpr bool is_letter(Symbol s) noexcept { return s >= kFirstLetter; }
constexpr Symbol symbol_of(unsigned char b) noexcept { return Symbol{b} + kFirstLetter; }
constexpr unsigned char byte_of(Symbol s) noexcept { return static_cast<unsigned char>(s - kFirstLetter); }

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or unusable input data (empty text, sentinel collisions).
class InputError : public Error {
public:
    using Error::Error;
};

// Parameter outside the documented domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Query exceeds the bound an optimized index was built for.
class BoundExceeded : public ParameterError {
public:
    using ParameterError::ParameterError;
};

// Corrupt, truncated or incompatible serialized data.
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ctxpat
