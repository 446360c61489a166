#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <memory>
#include <ostream>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "ctxpat/common.hpp"
#include "ctxpat/cpm.hpp"
#include "ctxpat/mined_pattern.hpp"
#include "ctxpat/suffix_array.hpp"
#include "ctxpat/text.hpp"

namespace ctxpat::em {

struct EmConfig {
    std::size_t budget_bytes = std::size_t{64} << 20;
    std::size_t block_bytes = std::size_t{64} << 10;
    std::filesystem::path tmp_dir = std::filesystem::temp_directory_path();

    void validate() const {
        if (block_bytes == 0) {
            throw ParameterError("block size must be positive");
        }
        if (budget_bytes < 2 * block_bytes) {
            throw ParameterError("memory budget must be at least two blocks");
        }
    }
};

struct IoStats {
    std::uint64_t blocks_read = 0;
    std::uint64_t blocks_written = 0;
    std::uint64_t runs_formed = 0;
    std::uint64_t merge_passes = 0;
};

/// Tracks bytes held by tuple buffers (stream buffers, run arrays, merge heaps).
class MemoryLedger {
public:
    explicit MemoryLedger(std::size_t budget) : budget_(budget) {}

    void acquire(std::size_t bytes) {
        current_ += bytes;
        peak_ = std::max(peak_, current_);
    }
    void release(std::size_t bytes) { current_ -= bytes; }

    std::size_t budget() const noexcept { return budget_; }
    std::size_t current() const noexcept { return current_; }
    std::size_t peak() const noexcept { return peak_; }

private:
    std::size_t budget_;
    std::size_t current_ = 0;
    std::size_t peak_ = 0;
};

// Ledger entry released on scope exit.
class Reservation {
public:
    Reservation(MemoryLedger& ledger, std::size_t bytes) : ledger_(&ledger), bytes_(bytes) { ledger.acquire(bytes); }
    Reservation(const Reservation&) = delete;
    Reservation& operator=(const Reservation&) = delete;
    ~Reservation() { ledger_->release(bytes_); }

private:
    MemoryLedger* ledger_;
    std::size_t bytes_;
};

/// Scratch state shared by one pipeline run.
class EmContext {
public:
    explicit EmContext(EmConfig cfg) : cfg_(std::move(cfg)), ledger_(cfg_.budget_bytes) {
        cfg_.validate();
        std::error_code ec;
        std::filesystem::create_directories(cfg_.tmp_dir, ec);
        if (!std::filesystem::is_directory(cfg_.tmp_dir)) {
            throw IoError("scratch directory unavailable: " + cfg_.tmp_dir.string());
        }
    }

    const EmConfig& config() const noexcept { return cfg_; }
    MemoryLedger& ledger() noexcept { return ledger_; }
    IoStats& io() noexcept { return io_; }
    const IoStats& io() const noexcept { return io_; }

    std::filesystem::path fresh_path() {
        static std::atomic<std::uint64_t> counter{0};
        return cfg_.tmp_dir / ("ctxpat-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".run");
    }

    std::uint64_t blocks_for(std::size_t bytes) const {
        return (bytes + cfg_.block_bytes - 1) / cfg_.block_bytes;
    }

private:
    EmConfig cfg_;
    MemoryLedger ledger_;
    IoStats io_;
};

inline constexpr char kRunMagic[8] = {'C', 'T', 'X', 'P', 'R', 'U', 'N', '1'};
inline constexpr std::size_t kRunHeaderBytes = 24;

/// A file of fixed-width records: magic, arity (u32), field width (u32),
/// record count (u64), then count * arity little-endian fields. The file is
/// removed when the owning object is destroyed.
class RunFile {
public:
    RunFile() = default;
    RunFile(std::filesystem::path path, std::uint32_t arity, std::uint32_t width, std::uint64_t count)
        : path_(std::move(path)), arity_(arity), width_(width), count_(count) {}
    RunFile(const RunFile&) = delete;
    RunFile& operator=(const RunFile&) = delete;
    RunFile(RunFile&& o) noexcept { *this = std::move(o); }
    RunFile& operator=(RunFile&& o) noexcept {
        if (this != &o) {
            remove();
            path_ = std::exchange(o.path_, {});
            arity_ = o.arity_;
            width_ = o.width_;
            count_ = o.count_;
        }
        return *this;
    }
    ~RunFile() { remove(); }

    const std::filesystem::path& path() const noexcept { return path_; }
    std::uint32_t arity() const noexcept { return arity_; }
    std::uint32_t width() const noexcept { return width_; }
    std::uint64_t count() const noexcept { return count_; }
    std::size_t record_bytes() const noexcept { return std::size_t{arity_} * width_; }

    void remove() noexcept {
        if (!path_.empty()) {
            std::error_code ec;
            std::filesystem::remove(path_, ec);
            path_.clear();
        }
    }

private:
    std::filesystem::path path_;
    std::uint32_t arity_ = 0;
    std::uint32_t width_ = 0;
    std::uint64_t count_ = 0;
};

template <std::size_t K>
using Record = std::array<std::uint64_t, K>;

/// Smallest supported field width for values up to n + 1.
inline std::uint32_t field_width(std::uint64_t n) { return n + 2 <= (std::uint64_t{1} << 32) ? 4 : 8; }

namespace detail {

inline std::size_t stream_buffer_bytes(const EmConfig& cfg, std::size_t record_bytes, std::size_t share) {
    std::size_t s = std::min(cfg.block_bytes, cfg.budget_bytes / share);
    s -= s % record_bytes;
    return std::max(s, record_bytes);
}

} // namespace detail

template <std::size_t K>
class RunWriter {
public:
    RunWriter(EmContext& ctx, std::uint32_t width, std::size_t buffer_bytes)
        : ctx_(ctx), path_(ctx.fresh_path()), width_(width), rec_bytes_(K * width),
          cap_(std::max(buffer_bytes - buffer_bytes % rec_bytes_, rec_bytes_)), hold_(ctx.ledger(), cap_),
          out_(path_, std::ios::binary | std::ios::trunc) {
        if (!out_) {
            throw IoError("cannot create scratch file " + path_.string());
        }
        char header[kRunHeaderBytes] = {};
        std::memcpy(header, kRunMagic, 8);
        put_le(header + 8, K, 4);
        put_le(header + 12, width, 4);
        out_.write(header, kRunHeaderBytes);
        buf_.reserve(cap_);
    }
    RunWriter(const RunWriter&) = delete;
    RunWriter& operator=(const RunWriter&) = delete;
    ~RunWriter() {
        if (!finished_) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }

    void push(const Record<K>& rec) {
        if (buf_.size() + rec_bytes_ > cap_) {
            flush();
        }
        const std::size_t at = buf_.size();
        buf_.resize(at + rec_bytes_);
        for (std::size_t f = 0; f < K; ++f) {
            put_le(buf_.data() + at + f * width_, rec[f], width_);
        }
        ++count_;
    }

    RunFile finish() {
        flush();
        char count[8];
        put_le(count, count_, 8);
        out_.seekp(16);
        out_.write(count, 8);
        out_.close();
        if (!out_) {
            throw IoError("write failed: " + path_.string());
        }
        finished_ = true;
        return RunFile(path_, K, width_, count_);
    }

private:
    static void put_le(char* dst, std::uint64_t v, std::size_t width) {
        for (std::size_t i = 0; i < width; ++i) {
            dst[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        }
    }

    void flush() {
        if (buf_.empty()) {
            return;
        }
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        if (!out_) {
            throw IoError("write failed (scratch space exhausted?): " + path_.string());
        }
        ctx_.io().blocks_written += ctx_.blocks_for(buf_.size());
        buf_.clear();
    }

    EmContext& ctx_;
    std::filesystem::path path_;
    std::uint32_t width_;
    std::size_t rec_bytes_;
    std::size_t cap_;
    Reservation hold_;
    std::ofstream out_;
    std::vector<char> buf_;
    std::uint64_t count_ = 0;
    bool finished_ = false;
};

template <std::size_t K>
class RunReader {
public:
    RunReader(EmContext& ctx, const RunFile& file, std::size_t buffer_bytes)
        : ctx_(ctx), width_(file.width()), rec_bytes_(K * file.width()),
          cap_(std::max(buffer_bytes - buffer_bytes % rec_bytes_, rec_bytes_)), hold_(ctx.ledger(), cap_),
          in_(file.path(), std::ios::binary) {
        if (file.arity() != K) {
            throw FormatError("run file arity mismatch");
        }
        if (!in_) {
            throw IoError("cannot open scratch file " + file.path().string());
        }
        char header[kRunHeaderBytes];
        in_.read(header, kRunHeaderBytes);
        if (!in_ || std::memcmp(header, kRunMagic, 8) != 0 || get_le(header + 8, 4) != K ||
            get_le(header + 12, 4) != width_ || get_le(header + 16, 8) != file.count()) {
            throw FormatError("corrupt run file header: " + file.path().string());
        }
        const auto size = std::filesystem::file_size(file.path());
        if (size != kRunHeaderBytes + file.count() * rec_bytes_) {
            throw FormatError("run file length does not match its record count");
        }
        remaining_ = file.count();
        buf_.resize(cap_);
    }

    bool next(Record<K>& rec) {
        if (pos_ == filled_) {
            if (!refill()) {
                return false;
            }
        }
        for (std::size_t f = 0; f < K; ++f) {
            rec[f] = get_le(buf_.data() + pos_ + f * width_, width_);
        }
        pos_ += rec_bytes_;
        return true;
    }

private:
    static std::uint64_t get_le(const char* src, std::size_t width) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[i])) << (8 * i);
        }
        return v;
    }

    bool refill() {
        if (remaining_ == 0) {
            return false;
        }
        const std::uint64_t take = std::min<std::uint64_t>(remaining_, cap_ / rec_bytes_);
        const std::size_t bytes = static_cast<std::size_t>(take) * rec_bytes_;
        in_.read(buf_.data(), static_cast<std::streamsize>(bytes));
        if (!in_) {
            throw IoError("read failed on scratch file");
        }
        ctx_.io().blocks_read += ctx_.blocks_for(bytes);
        remaining_ -= take;
        pos_ = 0;
        filled_ = bytes;
        return true;
    }

    EmContext& ctx_;
    std::uint32_t width_;
    std::size_t rec_bytes_;
    std::size_t cap_;
    Reservation hold_;
    std::ifstream in_;
    std::vector<char> buf_;
    std::uint64_t remaining_ = 0;
    std::size_t pos_ = 0;
    std::size_t filled_ = 0;
};

/// Lexicographic order on the listed fields.
template <std::size_t... F>
struct ByFields {
    template <std::size_t K>
    bool operator()(const Record<K>& a, const Record<K>& b) const {
        for (std::size_t f : {F...}) {
            if (a[f] != b[f]) {
                return a[f] < b[f];
            }
        }
        return false;
    }
};

/// Stable external merge sort. Consumes `input`; every intermediate run file
/// is deleted as soon as it has been merged.
template <std::size_t K, typename Less>
RunFile external_sort(EmContext& ctx, RunFile input, Less less) {
    const EmConfig& cfg = ctx.config();
    const std::uint32_t width = input.width();
    const std::size_t rec_bytes = std::size_t{K} * width;
    if (cfg.block_bytes < rec_bytes) {
        throw ParameterError("block size smaller than one record");
    }

    struct Entry {
        Record<K> rec;
        std::uint64_t seq;
    };
    const std::size_t s = detail::stream_buffer_bytes(cfg, rec_bytes, 4);
    if (cfg.budget_bytes < 2 * s + 2 * sizeof(Entry)) {
        throw ParameterError("memory budget too small for run formation");
    }
    const std::size_t capacity = (cfg.budget_bytes - 2 * s) / sizeof(Entry);

    std::vector<RunFile> runs;
    {
        RunReader<K> reader(ctx, input, s);
        Reservation hold(ctx.ledger(), capacity * sizeof(Entry));
        std::vector<Entry> chunk;
        chunk.reserve(capacity);
        std::uint64_t seq = 0;
        Record<K> rec;
        bool more = true;
        while (more) {
            chunk.clear();
            while (chunk.size() < capacity && (more = reader.next(rec))) {
                chunk.push_back(Entry{rec, seq++});
            }
            if (chunk.empty()) {
                break;
            }
            std::sort(chunk.begin(), chunk.end(), [&](const Entry& a, const Entry& b) {
                if (less(a.rec, b.rec)) {
                    return true;
                }
                if (less(b.rec, a.rec)) {
                    return false;
                }
                return a.seq < b.seq;
            });
            RunWriter<K> writer(ctx, width, s);
            for (const auto& e : chunk) {
                writer.push(e.rec);
            }
            runs.push_back(writer.finish());
            ++ctx.io().runs_formed;
        }
    }
    input.remove();
    if (runs.empty()) {
        RunWriter<K> writer(ctx, width, s);
        return writer.finish();
    }

    struct HeapEntry {
        Record<K> rec;
        std::size_t run;
    };
    const std::size_t sm = detail::stream_buffer_bytes(cfg, rec_bytes, 4);
    const std::size_t fan_in = (cfg.budget_bytes - std::min(cfg.budget_bytes, sm)) / (sm + sizeof(HeapEntry));
    if (fan_in < 2) {
        throw ParameterError("memory budget too small for a two-way merge");
    }

    while (runs.size() > 1) {
        std::vector<RunFile> next;
        for (std::size_t g = 0; g < runs.size(); g += fan_in) {
            const std::size_t k = std::min(fan_in, runs.size() - g);
            if (k == 1) {
                next.push_back(std::move(runs[g]));
                continue;
            }
            {
                std::vector<std::unique_ptr<RunReader<K>>> readers;
                for (std::size_t j = 0; j < k; ++j) {
                    readers.push_back(std::make_unique<RunReader<K>>(ctx, runs[g + j], sm));
                }
                Reservation heap_hold(ctx.ledger(), k * sizeof(HeapEntry));
                auto after = [&](const HeapEntry& a, const HeapEntry& b) {
                    if (less(b.rec, a.rec)) {
                        return true;
                    }
                    if (less(a.rec, b.rec)) {
                        return false;
                    }
                    return a.run > b.run;
                };
                std::vector<HeapEntry> storage;
                storage.reserve(k);
                std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(after)> heap(after,
                                                                                         std::move(storage));
                for (std::size_t j = 0; j < k; ++j) {
                    HeapEntry e{{}, j};
                    if (readers[j]->next(e.rec)) {
                        heap.push(e);
                    }
                }
                RunWriter<K> writer(ctx, width, sm);
                while (!heap.empty()) {
                    HeapEntry e = heap.top();
                    heap.pop();
                    writer.push(e.rec);
                    if (readers[e.run]->next(e.rec)) {
                        heap.push(e);
                    }
                }
                next.push_back(writer.finish());
            }
            for (std::size_t j = 0; j < k; ++j) {
                runs[g + j].remove();
            }
        }
        runs = std::move(next);
        ++ctx.io().merge_passes;
    }
    return std::move(runs.front());
}

struct EmReport {
    IoStats io;
    std::size_t peak_buffer_bytes = 0;
    std::size_t budget_bytes = 0;
};

namespace detail {

// Records written in Phase 1; field order noted per file.
//   rank file:    (pos, lcp) in rank order of T
//   revrank file: (pos, lcp) in rank order of the reverse text
//   lkey file:    (pos, left-flank rank) in position order

inline std::vector<index_t> dense_ranks(const std::vector<std::uint64_t>& keys) {
    std::vector<index_t> order(keys.size());
    for (index_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    ctxpat::detail::radix_sort(order, [&](index_t i) { return keys[i]; });
    std::vector<index_t> rank(keys.size());
    index_t r = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0 && keys[order[k]] != keys[order[k - 1]]) {
            ++r;
        }
        rank[order[k]] = r;
    }
    return rank;
}

} // namespace detail

/// External-memory miner. Suffix structures are built in memory and streamed
/// to run files; everything after that is scans and external sorts within the
/// budget. Output is byte-identical to write_patterns(mine_im(...)).
inline EmReport mine_em(const Text& t, const CpmParams& prm, const EmConfig& cfg, std::ostream& out) {
    prm.validate(t.size());
    EmContext ctx(cfg);
    const index_t n = t.size();
    const std::uint32_t w = field_width(n);
    const auto text = t.symbols();
    const std::size_t s4 = detail::stream_buffer_bytes(cfg, 6 * w, 4);

    RunFile rank_file, rev_file, lkey_file;
    {
        const auto sa = build_sa(t);
        const auto isa = build_isa(sa);
        const auto lcp = build_lcp(text, sa, isa);
        {
            RunWriter<2> wr(ctx, w, s4);
            for (index_t k = 0; k < n; ++k) {
                wr.push({sa.pos[k] + 1ull, lcp.lcp[k]});
            }
            rank_file = wr.finish();
        }
        {
            const auto keys = detail::dense_ranks(left_flank_keys(isa, lcp, prm.l));
            RunWriter<2> wr(ctx, w, s4);
            for (index_t p = 1; p <= n; ++p) {
                wr.push({p, keys[p - 1]});
            }
            lkey_file = wr.finish();
        }
        const Text rev = reverse_text(t);
        const auto sa_r = build_sa(rev);
        const auto lcp_r = build_lcp(rev, sa_r);
        RunWriter<2> wr(ctx, w, s4);
        for (index_t k = 0; k < n; ++k) {
            wr.push({sa_r.pos[k] + 1ull, lcp_r.lcp[k]});
        }
        rev_file = wr.finish();
    }

    // Phases 2-3: (pos, rank, int, sint).
    RunFile t4;
    {
        RunReader<2> rd(ctx, rank_file, s4);
        RunWriter<4> wr(ctx, w, s4);
        Record<2> x;
        std::uint64_t rank = 0, int_id = 0, sint_id = 0;
        while (rd.next(x)) {
            int_id += (rank == 0 || x[1] < prm.m) ? 1 : 0;
            sint_id += (rank == 0 || x[1] < prm.m + prm.r) ? 1 : 0;
            ++rank;
            wr.push({x[0], rank, int_id, sint_id});
        }
        t4 = wr.finish();
    }
    rank_file.remove();

    // Phase 4: (pos, rint).
    RunFile t2;
    {
        RunReader<2> rd(ctx, rev_file, s4);
        RunWriter<2> wr(ctx, w, s4);
        Record<2> x;
        std::uint64_t rank = 0, rint_id = 0;
        while (rd.next(x)) {
            rint_id += (rank == 0 || x[1] < prm.l) ? 1 : 0;
            ++rank;
            wr.push({n + 1ull - x[0], rint_id});
        }
        t2 = wr.finish();
    }
    rev_file.remove();

    t4 = external_sort<4>(ctx, std::move(t4), ByFields<0>{});
    t2 = external_sort<2>(ctx, std::move(t2), ByFields<0>{});

    // Phase 5: (int, sint, rint, lkey, pos, rank).
    RunFile t5;
    {
        RunReader<4> r4(ctx, t4, s4);
        RunReader<2> r2(ctx, t2, s4);
        RunReader<2> rl(ctx, lkey_file, s4);
        RunWriter<6> wr(ctx, w, s4);
        Record<4> a;
        Record<2> b, c;
        while (r4.next(a)) {
            if (!r2.next(b) || !rl.next(c) || b[0] != a[0] || c[0] != a[0]) {
                throw Error("phase 5 alignment mismatch at position " + std::to_string(a[0]));
            }
            if (a[0] + prm.m > n) {
                continue;
            }
            wr.push({a[2], a[3], b[1], c[1], a[0], a[1]});
        }
        t5 = wr.finish();
    }
    t4.remove();
    t2.remove();
    lkey_file.remove();

    // Phase 6: count distinct (sint, rint) per interval; keep one
    // representative per distinct pair as (int, lkey, sint, pos).
    t5 = external_sort<6>(ctx, std::move(t5), ByFields<0, 1, 2>{});
    RunFile pairs, counts;
    {
        RunReader<6> rd(ctx, t5, s4);
        RunWriter<4> wp(ctx, w, s4);
        RunWriter<2> wc(ctx, w, s4);
        Record<6> x, prev{};
        bool first = true;
        std::uint64_t distinct = 0;
        while (rd.next(x)) {
            if (!first && x[0] != prev[0]) {
                wc.push({prev[0], distinct});
                distinct = 0;
            }
            if (first || x[0] != prev[0] || x[1] != prev[1] || x[2] != prev[2]) {
                ++distinct;
                wp.push({x[0], x[3], x[1], x[4]});
            }
            prev = x;
            first = false;
        }
        if (!first) {
            wc.push({prev[0], distinct});
        }
        pairs = wp.finish();
        counts = wc.finish();
    }
    t5.remove();
    pairs = external_sort<4>(ctx, std::move(pairs), ByFields<0, 1, 2>{});

    {
        RunReader<4> rp(ctx, pairs, s4);
        RunReader<2> rc(ctx, counts, s4);
        Record<4> x;
        Record<2> c{};
        bool have_count = false;
        std::uint64_t current = 0;
        bool emit = false;
        while (rp.next(x)) {
            if (!have_count || x[0] != current) {
                while ((have_count = rc.next(c)) && c[0] < x[0]) {
                }
                if (!have_count || c[0] != x[0]) {
                    throw Error("phase 6 count stream out of step");
                }
                current = x[0];
                emit = c[1] >= prm.tau;
                if (emit) {
                    const index_t p0 = static_cast<index_t>(x[3] - 1);
                    write_pattern_header(out, text.subspan(p0, prm.m), c[1]);
                }
            }
            if (emit) {
                const auto p0 = static_cast<index_t>(x[3] - 1);
                const index_t left_begin = p0 >= prm.l ? p0 - prm.l : 0;
                const index_t right_end = std::min<index_t>(n, p0 + prm.m + prm.r);
                write_context_line(out, text.subspan(left_begin, p0 - left_begin),
                                   text.subspan(p0 + prm.m, right_end - p0 - prm.m));
            }
        }
    }
    if (!out) {
        throw IoError("output write failed");
    }
    return EmReport{ctx.io(), ctx.ledger().peak(), cfg.budget_bytes};
}

} // namespace ctxpat::em
