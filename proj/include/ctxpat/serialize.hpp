#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <zlib.h>

#include "ctxpat/common.hpp"

namespace ctxpat {

inline std::uint32_t crc32_of(std::string_view bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks.
    constexpr std::size_t kChunk = std::size_t{1} << 30;
    for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
        const std::size_t len = std::min(kChunk, bytes.size() - off);
        crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(len));
    }
    return static_cast<std::uint32_t>(crc);
}

/// Appends fixed-width little-endian integers to a byte buffer.
class BinaryWriter {
public:
    template <typename T>
        requires std::is_unsigned_v<T>
    void put(T value) {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buf_.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
        }
    }

    void put_bytes(std::string_view bytes) { buf_.append(bytes); }

    template <typename T>
        requires std::is_unsigned_v<T>
    void put_vector(std::span<const T> values) {
        put<std::uint64_t>(values.size());
        for (T v : values) {
            put(v);
        }
    }

    template <typename T>
    void put_vector(const std::vector<T>& values) {
        put_vector(std::span<const T>(values));
    }

    const std::string& bytes() const noexcept { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

/// Reads what BinaryWriter wrote; every overrun is a FormatError.
class BinaryReader {
public:
    explicit BinaryReader(std::string_view bytes) : bytes_(bytes) {}

    template <typename T>
        requires std::is_unsigned_v<T>
    T get() {
        need(sizeof(T));
        T value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(T);
        return value;
    }

    std::string_view get_bytes(std::size_t n) {
        need(n);
        auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    template <typename T>
        requires std::is_unsigned_v<T>
    std::vector<T> get_vector() {
        const auto count = get<std::uint64_t>();
        if (count > (bytes_.size() - pos_) / sizeof(T)) {
            throw FormatError("corrupt data: array length exceeds remaining bytes");
        }
        std::vector<T> out(static_cast<std::size_t>(count));
        for (auto& v : out) {
            v = get<T>();
        }
        return out;
    }

    std::size_t position() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw FormatError("corrupt data: unexpected end of input");
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace ctxpat
