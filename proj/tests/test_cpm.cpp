#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include "ctxpat/cpm.hpp"
#include "ctxpat/oracle.hpp"
#include "test_support.hpp"

using namespace ctxpat;

namespace {

const char* const kExample = "CTAAGAAGAATGAAC";

std::string dump(const std::vector<MinedPattern>& v) {
    std::ostringstream os;
    write_patterns(os, v);
    return os.str();
}

const Tuple4& t4_at(const std::vector<Tuple4>& t4, index_t pos) {
    return *std::find_if(t4.begin(), t4.end(), [&](const Tuple4& x) { return x.pos == pos; });
}

const Tuple2& t2_at(const std::vector<Tuple2>& t2, index_t pos) {
    return *std::find_if(t2.begin(), t2.end(), [&](const Tuple2& x) { return x.pos == pos; });
}

Flank left_flank(std::span<const Symbol> s, index_t pos, index_t l) {
    const index_t p0 = pos - 1;
    return Flank(s.begin() + (p0 >= l ? p0 - l : 0), s.begin() + p0);
}

} // namespace

TEST(Cpm, PartitionBananaDepthTwo) {
    const std::vector<index_t> lcp{0, 0, 1, 3, 0, 0, 2};
    EXPECT_EQ(partition_intervals(lcp, 2), (std::vector<index_t>{1, 2, 3, 3, 4, 5, 5}));
    EXPECT_EQ(partition_intervals(lcp, 1), (std::vector<index_t>{1, 2, 2, 2, 3, 4, 4}));
}

TEST(Cpm, PartitionDistinctLetters) {
    const Text t = Text::from_bytes("abcdefg");
    const auto sa = build_sa(t);
    const auto lcp = build_lcp(t, sa);
    EXPECT_EQ(partition_intervals(lcp.lcp, 1), (std::vector<index_t>{1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(Cpm, PartitionMatchesPrefixEquality) {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 30; ++trial) {
        const Text t = ctxpat::testing::random_text(rng, 1 + rng() % 120, 1 + trial % 4);
        const auto sa = build_sa(t);
        const auto lcp = build_lcp(t, sa);
        for (index_t depth = 1; depth <= 5; ++depth) {
            const auto ids = partition_intervals(lcp.lcp, depth);
            ASSERT_EQ(ids.front(), 1u);
            for (index_t a = 0; a < t.size(); ++a) {
                if (a > 0) {
                    ASSERT_LE(ids[a] - ids[a - 1], 1u);
                }
                for (index_t b = a + 1; b < t.size(); ++b) {
                    const bool same = ctxpat::testing::naive_lce0(t.symbols(), sa.pos[a], sa.pos[b]) >= depth;
                    ASSERT_EQ(ids[a] == ids[b], same);
                }
            }
        }
    }
}

TEST(Cpm, ParameterValidation) {
    const Text t = Text::from_bytes("abcd"); // n = 5
    EXPECT_THROW(mine_im(t, {0, 1, 0, 0}), ParameterError);
    EXPECT_THROW(mine_im(t, {1, 0, 0, 0}), ParameterError);
    EXPECT_THROW(mine_im(t, {1, 3, 0, 3}), ParameterError);
    EXPECT_THROW(mine_im(t, {1, 1, 5, 0}), ParameterError);
    EXPECT_NO_THROW(mine_im(t, {1, 2, 4, 3}));
}

TEST(Cpm, WorkedExampleSharedIntervalIds) {
    const Text t = Text::from_bytes(kExample);
    const auto p1 = cpm_phase1(t);
    const auto [t4, t2] = phase2_to_4(p1, {3, 2, 2, 1});
    const auto id = t4_at(t4, 3).int_id;
    for (index_t pos : {6u, 9u, 13u}) {
        EXPECT_EQ(t4_at(t4, pos).int_id, id);
    }
    // No other window starts with AA.
    EXPECT_EQ(std::count_if(t4.begin(), t4.end(), [&](const Tuple4& x) { return x.int_id == id; }), 4);
}

TEST(Cpm, EmptyLeftFlankSharesOneReverseId) {
    const Text t = Text::from_bytes(kExample);
    const auto p1 = cpm_phase1(t);
    const auto t2 = phase2_to_4(p1, {1, 1, 0, 0}).second;
    for (const auto& x : t2) {
        EXPECT_EQ(x.rint_id, 1u);
    }
}

TEST(Cpm, IdsGroupBySubstringsOnRandomTexts) {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 25; ++trial) {
        const Text t = ctxpat::testing::random_text(rng, 5 + rng() % 80, 2 + trial % 3);
        const auto s = t.symbols();
        const index_t n = t.size();
        const CpmParams prm{1, 1 + static_cast<index_t>(trial % 3), static_cast<index_t>(trial % 4),
                            static_cast<index_t>((trial / 4) % 3)};
        const auto p1 = cpm_phase1(t);
        const auto [t4, t2] = phase2_to_4(p1, prm);
        ASSERT_EQ(t2.size(), n);
        std::map<index_t, index_t> rint_of, int_of_sint;
        for (const auto& x : t2) {
            rint_of[x.pos] = x.rint_id;
        }
        ASSERT_EQ(rint_of.size(), n);
        ASSERT_EQ(rint_of.begin()->first, 1u);
        for (index_t p = 1; p <= n; ++p) {
            for (index_t q = p + 1; q <= n; ++q) {
                ASSERT_EQ(rint_of[p] == rint_of[q], left_flank(s, p, prm.l) == left_flank(s, q, prm.l))
                    << p << " " << q;
            }
        }
        for (const auto& a : t4) {
            const auto it = int_of_sint.emplace(a.sint_id, a.int_id).first;
            ASSERT_EQ(it->second, a.int_id) << "subinterval straddles intervals";
            for (const auto& b : t4) {
                if (a.pos == b.pos) {
                    continue;
                }
                const index_t lce = ctxpat::testing::naive_lce0(s, a.pos - 1, b.pos - 1);
                ASSERT_EQ(a.int_id == b.int_id, lce >= prm.m);
                ASSERT_EQ(a.sint_id == b.sint_id, lce >= prm.m + prm.r);
            }
        }
    }
}

TEST(Cpm, MergeJoinsWorkedExamplePosition) {
    const Text t = Text::from_bytes(kExample);
    const auto p1 = cpm_phase1(t);
    auto [t4, t2] = phase2_to_4(p1, {3, 2, 2, 1});
    const auto int9 = t4_at(t4, 9).int_id;
    const auto sint9 = t4_at(t4, 9).sint_id;
    std::sort(t4.begin(), t4.end(), [](auto& a, auto& b) { return a.pos < b.pos; });
    std::sort(t2.begin(), t2.end(), [](auto& a, auto& b) { return a.pos < b.pos; });
    const auto t5 = phase5_merge(t4, t2, p1.n(), 2);
    const auto it = std::find_if(t5.begin(), t5.end(), [](const Tuple5& x) { return x.pos == 9; });
    ASSERT_NE(it, t5.end());
    EXPECT_EQ(it->int_id, int9);                   // "AA"
    EXPECT_EQ(it->sint_id, sint9);                 // "AAT"
    EXPECT_NE(it->sint_id, t4_at(t4, 6).sint_id);  // "AAG"
    EXPECT_EQ(it->rint_id, t2_at(t2, 6).rint_id);  // both preceded by "AG"
    EXPECT_NE(it->rint_id, t2_at(t2, 3).rint_id);  // preceded by "CT"
}

TEST(Cpm, MergeSingleWindowAndMismatch) {
    const Text t = Text::from_bytes("abc");
    const auto p1 = cpm_phase1(t);
    auto [t4, t2] = phase2_to_4(p1, {1, 3, 0, 0});
    std::sort(t4.begin(), t4.end(), [](auto& a, auto& b) { return a.pos < b.pos; });
    std::sort(t2.begin(), t2.end(), [](auto& a, auto& b) { return a.pos < b.pos; });
    const auto t5 = phase5_merge(t4, t2, p1.n(), 3);
    ASSERT_EQ(t5.size(), 1u);
    EXPECT_EQ(t5[0].pos, 1u);
    t2.erase(t2.begin());
    EXPECT_THROW(phase5_merge(t4, t2, p1.n(), 3), Error);
}

TEST(Cpm, MergeCoversEveryWindow) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const Text t = ctxpat::testing::random_text(rng, 2 + rng() % 100, 3);
        const index_t m = 1 + static_cast<index_t>(rng() % std::min<index_t>(4, t.size() - 1));
        const auto p1 = cpm_phase1(t);
        auto [t4, t2] = phase2_to_4(p1, {1, m, 0, 0});
        std::sort(t4.begin(), t4.end(), [](auto& a, auto& b) { return a.pos < b.pos; });
        std::sort(t2.begin(), t2.end(), [](auto& a, auto& b) { return a.pos < b.pos; });
        const auto t5 = phase5_merge(t4, t2, p1.n(), m);
        ASSERT_EQ(t5.size(), t.size() - m);
        for (index_t k = 0; k < t5.size(); ++k) {
            ASSERT_EQ(t5[k].pos, k + 1);
        }
    }
}

TEST(Cpm, WorkedExampleMining) {
    const Text t = Text::from_bytes(kExample);
    const auto out = mine_im(t, {3, 2, 2, 1});
    EXPECT_EQ(dump(out), "AA\t4\n\tAG\tG\n\tAG\tT\n\tCT\tG\n\tTG\tC\n");
}

TEST(Cpm, HighThresholdGivesNothing) {
    const Text t = Text::from_bytes(kExample);
    EXPECT_TRUE(mine_im(t, {100, 2, 2, 1}).empty());
}

TEST(Cpm, WholePayloadPattern) {
    const Text t = Text::from_bytes("GATTACA");
    const auto out = mine_im(t, {1, t.size() - 1, 0, 0});
    EXPECT_EQ(dump(out), "GATTACA\t1\n\t-\t-\n");
}

TEST(Cpm, TruncatedFlanksAreKept) {
    const Text t = Text::from_bytes("banana");
    const auto out = mine_im(t, {1, 1, 1, 2});
    EXPECT_EQ(dump(out), dump(oracle::cpm_oracle(t, 1, 1, 1, 2)));
    EXPECT_NE(dump(out).find("\tn\t$\n"), std::string::npos);
    EXPECT_NE(dump(out).find("b\t1\n\t-\tan\n"), std::string::npos);
}

TEST(Cpm, MatchesOracleOnRandomGrid) {
    std::mt19937_64 rng(54);
    for (int trial = 0; trial < 12; ++trial) {
        const unsigned sigma = trial % 2 ? 2 : 4;
        const Text t = trial % 3 ? ctxpat::testing::random_text(rng, 1 + rng() % 150, sigma)
                                 : Text::from_bytes(ctxpat::testing::repetitive_string(rng, 1 + rng() % 150, sigma));
        for (index_t m = 1; m <= 4; ++m) {
            for (index_t l = 0; l <= 3; ++l) {
                for (index_t r = 0; r <= 3; ++r) {
                    if (m + r > t.size() || l >= t.size()) {
                        continue;
                    }
                    const auto all = oracle::cpm_oracle(t, 1, m, l, r);
                    for (index_t tau = 1; tau <= 4; ++tau) {
                        std::vector<MinedPattern> want;
                        for (const auto& p : all) {
                            if (p.context_size() >= tau) {
                                want.push_back(p);
                            }
                        }
                        ASSERT_EQ(mine_im(t, {tau, m, l, r}), want)
                            << "trial " << trial << " tau=" << tau << " m=" << m << " l=" << l << " r=" << r;
                    }
                }
            }
        }
    }
}

TEST(Cpm, OutputIsDeterministic) {
    std::mt19937_64 rng(55);
    const Text t = ctxpat::testing::random_text(rng, 300, 2);
    EXPECT_EQ(dump(mine_im(t, {2, 3, 2, 2})), dump(mine_im(t, {2, 3, 2, 2})));
}
