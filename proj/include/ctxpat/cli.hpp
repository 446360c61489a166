#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxpat/cpc_index.hpp"
#include "ctxpat/cpm.hpp"
#include "ctxpat/em.hpp"
#include "ctxpat/lz77.hpp"
#include "ctxpat/oracle.hpp"
#include "ctxpat/suffix_array.hpp"
#include "ctxpat/text.hpp"

namespace ctxpat::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kMismatch = 3 };

struct TextFlags {
    std::string path;
    std::optional<int> dollar;
    std::optional<int> hash;
    bool terminated = false;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--text", path, "Input text file (raw bytes)")->required()->check(CLI::ExistingFile);
        cmd.add_option("--dollar", dollar, "Byte value of the terminator (default: smallest unused byte)")
            ->check(CLI::Range(0, 255));
        cmd.add_option("--hash", hash, "Byte value of the gap marker (default: smallest free byte)")
            ->check(CLI::Range(0, 255));
        cmd.add_flag("--terminated", terminated, "The file already ends with its terminator byte");
    }

    Text load() const {
        LoadOptions opts;
        opts.policy = terminated ? SentinelPolicy::require_present : SentinelPolicy::append_if_missing;
        if (dollar) {
            opts.dollar = static_cast<unsigned char>(*dollar);
        }
        if (hash) {
            opts.hash = static_cast<unsigned char>(*hash);
        }
        return load_text(path, opts);
    }
};

struct EmFlags {
    double budget_mb = 64;
    double block_kb = 64;
    std::string tmp_dir = std::filesystem::temp_directory_path().string();

    void add_to(CLI::App& cmd) {
        cmd.add_option("--budget-mb", budget_mb, "RAM budget for the external engine (MiB)")
            ->check(CLI::PositiveNumber);
        cmd.add_option("--block-kb", block_kb, "Block size for the external engine (KiB)")->check(CLI::PositiveNumber);
        cmd.add_option("--tmp-dir", tmp_dir, "Scratch directory for run files");
    }

    em::EmConfig config() const {
        em::EmConfig cfg;
        cfg.budget_bytes = static_cast<std::size_t>(budget_mb * 1024 * 1024);
        cfg.block_bytes = static_cast<std::size_t>(block_kb * 1024);
        cfg.tmp_dir = tmp_dir;
        cfg.validate();
        return cfg;
    }
};

// Writes indexed symbols back as bytes using the text's sentinel bytes.
inline std::string to_bytes(std::span<const Symbol> s, SentinelMap map) {
    std::string out;
    out.reserve(s.size());
    for (Symbol c : s) {
        out.push_back(static_cast<char>(c == kDollar ? map.dollar : c == kHash ? map.hash : byte_of(c)));
    }
    return out;
}

/// Distinct length-m windows of the indexed text that contain no sentinel.
inline std::vector<std::vector<Symbol>> windows_of(std::span<const Symbol> s, index_t m) {
    std::set<std::vector<Symbol>> seen;
    index_t run = 0; // letters in a row ending at i
    for (std::size_t i = 0; i < s.size(); ++i) {
        run = is_letter(s[i]) ? run + 1 : 0;
        if (run >= m) {
            seen.emplace(s.begin() + static_cast<std::ptrdiff_t>(i + 1 - m), s.begin() + static_cast<std::ptrdiff_t>(i + 1));
        }
    }
    return {seen.begin(), seen.end()};
}

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(int argc, const char* const* argv) {
        CLI::App app{"Context-aware pattern mining and counting"};
        app.require_subcommand(1);
        app.set_version_flag("--version", "ctxpat 1.0");

        std::function<int()> action;

        // mine
        TextFlags mine_text;
        EmFlags mine_em;
        CpmParams prm;
        std::string engine = "im";
        std::string mine_out;
        auto* mine = app.add_subcommand("mine", "Report every length-m pattern with at least tau contexts");
        mine_text.add_to(*mine);
        mine->add_option("--tau", prm.tau, "Minimum context size")->required()->check(CLI::Range(1u, kNone));
        mine->add_option("--m", prm.m, "Pattern length")->required()->check(CLI::Range(1u, kNone));
        mine->add_option("--l", prm.l, "Left flank length")->required();
        mine->add_option("--r", prm.r, "Right flank length")->required();
        mine->add_option("--engine", engine, "im (in memory) or em (external memory)")
            ->check(CLI::IsMember({"im", "em"}));
        mine->add_option("--out", mine_out, "Output file (default: standard output)");
        mine_em.add_to(*mine);
        mine->callback([&] { action = [&] { return cmd_mine(mine_text, prm, engine, mine_em, mine_out); }; });

        // index-build
        TextFlags build_text;
        std::optional<index_t> bound;
        std::string index_out;
        bool simple = false;
        auto* build = app.add_subcommand("index-build", "Build a context counting index");
        build_text.add_to(*build);
        build->add_option("--bound", bound, "Build the bounded index for l + |P| + r <= B")
            ->check(CLI::Range(1u, kNone));
        build->add_option("--index-out", index_out, "Index file to write")->required();
        build->add_flag("--simple", simple, "Build the quadratic reference index instead");
        build->callback([&] { action = [&] { return cmd_index_build(build_text, bound, simple, index_out); }; });

        // query
        std::string query_index;
        std::string pattern;
        index_t ql = 0, qr = 0;
        bool breakdown = false;
        auto* query = app.add_subcommand("query", "Print the context size of one pattern");
        query->add_option("--index-in", query_index, "Index file")->required();
        query->add_option("--pattern", pattern, "Pattern")->required();
        query->add_option("--l", ql, "Left flank length")->required();
        query->add_option("--r", qr, "Right flank length")->required();
        query->add_flag("--breakdown", breakdown, "Also print the per-counter contributions");
        query->callback([&] { action = [&] { return cmd_query(query_index, pattern, ql, qr, breakdown); }; });

        // workload
        std::string wl_index, wl_patterns;
        index_t wm = 1, wlft = 0, wr = 0;
        auto* workload = app.add_subcommand("workload", "Query every distinct length-m substring");
        workload->add_option("--index-in", wl_index, "Index file")->required();
        workload->add_option("--m", wm, "Pattern length")->required()->check(CLI::Range(1u, kNone));
        workload->add_option("--l", wlft, "Left flank length")->required();
        workload->add_option("--r", wr, "Right flank length")->required();
        workload->add_option("--patterns", wl_patterns, "Query these patterns (one per line) instead")
            ->check(CLI::ExistingFile);
        workload->callback([&] { action = [&] { return cmd_workload(wl_index, wl_patterns, wm, wlft, wr); }; });

        // oracle-check
        TextFlags oc_text;
        index_t max_m = 3, max_flank = 2, max_tau = 3;
        bool with_em = false;
        auto* check = app.add_subcommand("oracle-check", "Compare every engine against brute force");
        oc_text.add_to(*check);
        check->add_option("--max-m", max_m, "Largest pattern length")->check(CLI::Range(1u, 64u));
        check->add_option("--max-flank", max_flank, "Largest l and r")->check(CLI::Range(0u, 64u));
        check->add_option("--max-tau", max_tau, "Largest tau for mining")->check(CLI::Range(1u, 64u));
        check->add_flag("--em", with_em, "Also compare the external-memory miner");
        check->callback([&] { action = [&] { return cmd_oracle_check(oc_text, max_m, max_flank, max_tau, with_em); }; });

        // lz77
        TextFlags lz_text;
        std::optional<index_t> lz_bound;
        std::string modified_out;
        auto* lz = app.add_subcommand("lz77", "Print LZ77 phrase starts; optionally write T'");
        lz_text.add_to(*lz);
        lz->add_option("--bound", lz_bound, "Bound B for the modified string")->check(CLI::Range(1u, kNone));
        lz->add_option("--modified-out", modified_out, "Write the modified string here (needs --bound)");
        lz->callback([&] { action = [&] { return cmd_lz77(lz_text, lz_bound, modified_out); }; });

        // dump-sa
        TextFlags sa_text;
        auto* dump = app.add_subcommand("dump-sa", "Print rank, SA and LCP as tab-separated integers");
        sa_text.add_to(*dump);
        dump->callback([&] { action = [&] { return cmd_dump_sa(sa_text); }; });

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out_, err_);
            return code == 0 ? kOk : kUsage;
        }
        try {
            return action();
        } catch (const ParameterError& e) {
            err_ << "error: " << e.what() << '\n';
            return kUsage;
        } catch (const Error& e) {
            err_ << "error: " << e.what() << '\n';
            return kDataError;
        } catch (const std::bad_alloc&) {
            err_ << "error: out of memory\n";
            return kDataError;
        }
    }

private:
    int cmd_mine(const TextFlags& tf, const CpmParams& prm, const std::string& engine, const EmFlags& emf,
                 const std::string& path) {
        const Text t = tf.load();
        std::ofstream file;
        std::ostream* out = &out_;
        if (!path.empty()) {
            file.open(path, std::ios::binary | std::ios::trunc);
            if (!file) {
                throw IoError("cannot write " + path);
            }
            out = &file;
        }
        if (engine == "em") {
            const auto report = em::mine_em(t, prm, emf.config(), *out);
            err_ << "em: blocks_read=" << report.io.blocks_read << " blocks_written=" << report.io.blocks_written
                 << " merge_passes=" << report.io.merge_passes << " peak_buffer_bytes=" << report.peak_buffer_bytes
                 << '\n';
        } else {
            write_patterns(*out, mine_im(t, prm));
        }
        out->flush();
        if (!*out) {
            throw IoError("output write failed");
        }
        return kOk;
    }

    int cmd_index_build(const TextFlags& tf, std::optional<index_t> bound, bool simple, const std::string& path) {
        const Text t = tf.load();
        if (simple && bound) {
            throw ParameterError("--simple and --bound are mutually exclusive");
        }
        const auto start = std::chrono::steady_clock::now();
        const CpcIndex idx = simple ? build_simple_index(t) : bound ? build_optimized_index(t, *bound) : build_index(t);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        save_index(idx, path);
        const auto s = idx.stats();
        err_ << "built index: n=" << s.text_length << " indexed=" << s.indexed_length << " nodes=" << s.nodes
             << " light=" << s.light_nodes << " points=" << s.total_points() << " seconds=" << secs << '\n';
        return kOk;
    }

    int cmd_query(const std::string& path, const std::string& pattern, index_t l, index_t r, bool breakdown) {
        const CpcIndex idx = load_index(path);
        const auto b = idx.query_breakdown(encode(pattern), l, r);
        out_ << b.total() << '\n';
        if (breakdown) {
            out_ << "q1\t" << b.q1 << "\nq2\t" << b.q2 << "\nq3\t" << b.q3 << '\n';
        }
        return kOk;
    }

    int cmd_workload(const std::string& path, const std::string& pattern_file, index_t m, index_t l, index_t r) {
        const CpcIndex idx = load_index(path);
        std::vector<std::vector<Symbol>> patterns;
        if (!pattern_file.empty()) {
            std::ifstream in(pattern_file, std::ios::binary);
            std::string line;
            while (std::getline(in, line)) {
                if (!line.empty()) {
                    patterns.push_back(encode(line));
                }
            }
        } else {
            patterns = windows_of(idx.tree().text(), m);
        }
        std::vector<std::uint64_t> counts(patterns.size());
        const auto start = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            counts[i] = idx.query(patterns[i], l, r);
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            out_ << render(patterns[i]) << '\t' << counts[i] << '\n';
        }
        const double mean_us = patterns.empty() ? 0.0 : secs * 1e6 / static_cast<double>(patterns.size());
        out_ << "# queries=" << patterns.size() << " mean_query_us=" << mean_us << '\n';
        return kOk;
    }

    int cmd_oracle_check(const TextFlags& tf, index_t max_m, index_t max_flank, index_t max_tau, bool with_em) {
        const Text t = tf.load();
        if (t.size() > oracle::kMaxOracleLength) {
            throw ParameterError("oracle-check is limited to texts of at most 5000 letters");
        }
        std::uint64_t checks = 0, mismatches = 0;
        auto report = [&](bool ok, const std::string& what) {
            ++checks;
            if (!ok) {
                ++mismatches;
                out_ << "MISMATCH\t" << what << '\n';
            }
        };

        const CpcIndex full = build_index(t);
        std::optional<CpcIndex> simple;
        try {
            simple = build_simple_index(t);
        } catch (const ParameterError&) {
            err_ << "note: text too long for the simple index; skipped\n";
        }
        for (index_t m = 1; m <= max_m && m < t.size(); ++m) {
            for (index_t l = 0; l <= max_flank; ++l) {
                for (index_t r = 0; r <= max_flank; ++r) {
                    const CpcIndex opt = build_optimized_index(t, l + m + r);
                    for (const auto& [p, want] : oracle::context_size_table(t, m, l, r)) {
                        const std::string tag = render(p) + " l=" + std::to_string(l) + " r=" + std::to_string(r) +
                                                " expected=" + std::to_string(want);
                        report(full.query(p, l, r) == want, "index " + tag);
                        report(opt.query(p, l, r) == want, "bounded-index " + tag);
                        if (simple) {
                            report(simple->query(p, l, r) == want, "simple-index " + tag);
                        }
                    }
                    for (index_t tau = 1; tau <= max_tau; ++tau) {
                        const CpmParams prm{tau, m, l, r};
                        if (static_cast<std::uint64_t>(m) + r > t.size() || l >= t.size()) {
                            continue;
                        }
                        std::ostringstream im, ref;
                        write_patterns(im, mine_im(t, prm));
                        write_patterns(ref, oracle::cpm_oracle(t, tau, m, l, r));
                        const std::string tag = "tau=" + std::to_string(tau) + " m=" + std::to_string(m) +
                                                " l=" + std::to_string(l) + " r=" + std::to_string(r);
                        report(im.str() == ref.str(), "mine-im " + tag);
                        if (with_em) {
                            std::ostringstream ems;
                            em::EmConfig cfg;
                            cfg.budget_bytes = 64 << 10;
                            cfg.block_bytes = 4 << 10;
                            em::mine_em(t, prm, cfg, ems);
                            report(ems.str() == im.str(), "mine-em " + tag);
                        }
                    }
                }
            }
        }
        out_ << "checks=" << checks << " mismatches=" << mismatches << '\n';
        return mismatches == 0 ? kOk : kMismatch;
    }

    int cmd_lz77(const TextFlags& tf, std::optional<index_t> bound, const std::string& modified_out) {
        const Text t = tf.load();
        const auto f = factorize(t);
        for (std::size_t i = 0; i < f.starts.size(); ++i) {
            out_ << (i ? "," : "") << f.starts[i];
        }
        out_ << '\n';
        if (!modified_out.empty()) {
            if (!bound) {
                throw ParameterError("--modified-out needs --bound");
            }
            const auto ms = build_modified_string(t, f, *bound);
            std::ofstream out(modified_out, std::ios::binary | std::ios::trunc);
            const std::string bytes = to_bytes(ms.symbols, t.sentinels());
            out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            if (!out) {
                throw IoError("cannot write " + modified_out);
            }
            err_ << "z=" << f.z() << " |T'|=" << ms.size() << '\n';
        }
        return kOk;
    }

    int cmd_dump_sa(const TextFlags& tf) {
        const Text t = tf.load();
        const auto sa = build_sa(t);
        const auto lcp = build_lcp(t, sa);
        for (index_t k = 0; k < sa.size(); ++k) {
            out_ << k + 1 << '\t' << sa.pos[k] + 1 << '\t' << lcp.lcp[k] << '\n';
        }
        return kOk;
    }

    std::ostream& out_;
    std::ostream& err_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return Runner(out, err).run(argc, argv);
}

} // namespace ctxpat::cli
