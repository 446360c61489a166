#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "ctxpat/heavy_path.hpp"
#include "ctxpat/suffix_array.hpp"
#include "ctxpat/suffix_tree.hpp"
#include "test_support.hpp"

using namespace ctxpat;

namespace {

struct Built {
    Text text;
    SuffixArray sa;
    LcpArray lcp;
    SuffixTree st;
};

Built build_all(const std::string& s) {
    Built b;
    b.text = Text::from_bytes(s);
    b.sa = build_sa(b.text);
    b.lcp = build_lcp(b.text, b.sa);
    b.st = SuffixTree::build(b.text, b.sa, b.lcp);
    return b;
}

index_t count_occurrences(std::span<const Symbol> t, std::span<const Symbol> p) {
    index_t c = 0;
    for (std::size_t i = 0; i + p.size() <= t.size(); ++i) {
        c += std::equal(p.begin(), p.end(), t.begin() + static_cast<std::ptrdiff_t>(i)) ? 1 : 0;
    }
    return c;
}

} // namespace

TEST(SuffixArray, BananaFixture) {
    const Text t = Text::from_bytes("banana");
    const auto sa = build_sa(t);
    const auto isa = build_isa(sa);
    const auto lcp = build_lcp(t, sa);
    EXPECT_EQ(sa.one_based(), (std::vector<index_t>{7, 6, 4, 2, 1, 5, 3}));
    EXPECT_EQ(isa.one_based(), (std::vector<index_t>{5, 4, 7, 3, 6, 2, 1}));
    EXPECT_EQ(lcp.lcp, (std::vector<index_t>{0, 0, 1, 3, 0, 0, 2}));
    EXPECT_EQ(sa.at(1), 7u);
    EXPECT_EQ(isa.at(7), 1u);
    EXPECT_EQ(lcp.at(4), 3u);

    const LceIndex lce(sa, lcp);
    EXPECT_EQ(lce.lce(3, 5), 2u);
    EXPECT_EQ(lce.lce(2, 4), 3u);
    EXPECT_EQ(lce.lce(1, 2), 0u);
    EXPECT_EQ(lce.lce(4, 4), 4u);
}

TEST(SuffixArray, MatchesNaiveOnRandomTexts) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const unsigned sigma = 1u + static_cast<unsigned>(trial % 8);
        const std::size_t n = 1 + rng() % 300;
        const Text t = trial % 3 == 0 ? Text::from_bytes(ctxpat::testing::repetitive_string(rng, n, sigma))
                                      : ctxpat::testing::random_text(rng, n, sigma);
        const auto sa = build_sa(t);
        const auto expected = ctxpat::testing::naive_sa(t.symbols());
        ASSERT_EQ(sa.pos, expected) << "trial " << trial;
        const auto lcp = build_lcp(t, sa);
        ASSERT_EQ(lcp.lcp, ctxpat::testing::naive_lcp(t.symbols(), expected));

        const LceIndex lce(sa, lcp);
        for (int q = 0; q < 50; ++q) {
            const index_t i = 1 + static_cast<index_t>(rng() % t.size());
            const index_t j = 1 + static_cast<index_t>(rng() % t.size());
            const index_t want = i == j ? t.size() - i + 1 : ctxpat::testing::naive_lce0(t.symbols(), i - 1, j - 1);
            ASSERT_EQ(lce.lce(i, j), want);
        }
    }
}

TEST(SuffixArray, GapMarkersSortBetweenTerminatorAndLetters) {
    const Text t = Text::from_symbols({symbol_of('a'), kHash, symbol_of('a'), kHash, kDollar}, {});
    const auto sa = build_sa(t);
    EXPECT_EQ(sa.pos, ctxpat::testing::naive_sa(t.symbols()));
    EXPECT_EQ(sa.one_based(), (std::vector<index_t>{5, 4, 2, 3, 1}));
}

TEST(RangeMin, MatchesScan) {
    std::mt19937_64 rng(3);
    std::vector<index_t> v(257);
    for (auto& x : v) {
        x = static_cast<index_t>(rng() % 1000);
    }
    const RangeMin rmq(v);
    for (int q = 0; q < 2000; ++q) {
        std::size_t a = rng() % v.size();
        std::size_t b = rng() % v.size();
        if (a > b) {
            std::swap(a, b);
        }
        ASSERT_EQ(rmq.min(a, b), *std::min_element(v.begin() + a, v.begin() + b + 1));
    }
}

TEST(SuffixTree, BananaShape) {
    const auto b = build_all("banana");
    const auto& st = b.st;
    ASSERT_EQ(st.node_count(), 11u);
    EXPECT_EQ(st.root(), 0u);
    EXPECT_EQ(st.preorder(st.root()), 1u);
    EXPECT_EQ(st.inf_depth(), 8u);

    // Preorder: root, $, a, a$, ana, ana$, anana$, banana$, na, na$, nana$.
    const std::vector<index_t> depth{0, 8, 1, 8, 3, 8, 8, 8, 2, 8, 8};
    const std::vector<index_t> parent{kNone, 0, 0, 2, 2, 4, 4, 0, 0, 8, 8};
    for (index_t v = 0; v < st.node_count(); ++v) {
        EXPECT_EQ(st.string_depth(v), depth[v]) << v;
        EXPECT_EQ(st.parent(v), parent[v]) << v;
    }
    EXPECT_EQ(st.leaf_range(2), (std::pair<index_t, index_t>{2, 4}));
    EXPECT_EQ(st.leaf_range(8), (std::pair<index_t, index_t>{6, 7}));
    EXPECT_EQ(st.leaf_count(0), 7u);
    EXPECT_EQ(st.rleaf(2), 6u);
    EXPECT_EQ(st.preorder(st.rleaf(2)), 7u);
    EXPECT_EQ(st.rleaf(0), 10u);
    EXPECT_TRUE(st.is_leaf(6));
    EXPECT_TRUE(st.has_infinite_depth(6));
    EXPECT_FALSE(st.is_leaf(4));
    EXPECT_EQ(std::vector<index_t>(st.children(0).begin(), st.children(0).end()),
              (std::vector<index_t>{1, 2, 7, 8}));
    for (index_t k = 0; k < 7; ++k) {
        EXPECT_TRUE(st.is_leaf(st.node_of_rank(k)));
    }
    EXPECT_EQ(st.node_of_rank(3), 6u);
}

TEST(SuffixTree, LocusFindsShallowestCoveringNode) {
    const auto b = build_all("banana");
    const auto& st = b.st;
    EXPECT_EQ(st.locus(encode("a")), std::optional<index_t>(2));
    EXPECT_EQ(st.locus(encode("an")), std::optional<index_t>(4));
    EXPECT_EQ(st.locus(encode("ana")), std::optional<index_t>(4));
    EXPECT_EQ(st.locus(encode("anan")), std::optional<index_t>(6));
    EXPECT_EQ(st.locus(encode("")), std::optional<index_t>(0));
    EXPECT_FALSE(st.locus(encode("nab")).has_value());
    EXPECT_FALSE(st.locus(encode("bananas")).has_value());
    EXPECT_FALSE(st.locus(encode("x")).has_value());
}

TEST(SuffixTree, RandomStructuralInvariants) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        const unsigned sigma = 1 + static_cast<unsigned>(rng() % 4);
        const auto b = build_all(ctxpat::testing::random_string(rng, n, sigma));
        const auto& st = b.st;
        const auto text = b.text.symbols();
        ASSERT_LE(st.node_count(), 2 * b.text.size());
        ASSERT_EQ(st.leaf_count(st.root()), b.text.size());
        for (index_t v = 1; v < st.node_count(); ++v) {
            ASSERT_GT(st.string_depth(v), st.string_depth(st.parent(v)));
            const auto [lo, hi] = st.leaf_range(v);
            if (st.is_leaf(v)) {
                ASSERT_EQ(lo, hi);
                ASSERT_TRUE(st.has_infinite_depth(v));
            } else {
                ASSERT_GE(st.children(v).size(), 2u);
                // Depth of an internal node is the minimum LCP inside its range.
                index_t mn = kNone;
                for (index_t k = lo; k < hi; ++k) {
                    mn = std::min(mn, b.lcp.lcp[k]);
                }
                ASSERT_EQ(st.string_depth(v), mn);
            }
        }
        // Loci agree with occurrence counts.
        for (int q = 0; q < 40; ++q) {
            const std::size_t len = 1 + rng() % 4;
            const auto p = encode(ctxpat::testing::random_string(rng, len, sigma));
            const index_t occ = count_occurrences(text, p);
            const auto loc = st.locus(p);
            ASSERT_EQ(loc.has_value(), occ > 0);
            if (loc) {
                ASSERT_EQ(st.leaf_count(*loc), occ);
                ASSERT_GE(st.string_depth(*loc), len);
                ASSERT_TRUE(*loc == st.root() || st.string_depth(st.parent(*loc)) < len);
            }
        }
    }
}

TEST(SuffixTree, TruncatedTreeStopsBeforeGapMarker) {
    const auto sym = encode("ab");
    // ab#ab#b$
    std::vector<Symbol> s{sym[0], sym[1], kHash, sym[0], sym[1], kHash, sym[1], kDollar};
    const auto sa = build_sa(s);
    const auto lcp = build_lcp(s, sa);
    const auto st = SuffixTree::build_truncated(s, sa, lcp);
    const auto gap = SuffixTree::gap_distances(s);
    EXPECT_EQ(gap, (std::vector<index_t>{2, 1, 0, 2, 1, 0, kNone, kNone}));
    EXPECT_EQ(st.leaf_count(st.root()), 8u);
    for (index_t v = 1; v < st.node_count(); ++v) {
        const index_t d = st.string_depth(v);
        if (!st.has_infinite_depth(v)) {
            EXPECT_LE(d, gap[st.label_position(v)]) << v;
        }
    }
    // "ab" occurs twice, always followed by '#': a truncated leaf of depth 2.
    const auto loc = st.locus(encode("ab"));
    ASSERT_TRUE(loc);
    EXPECT_TRUE(st.is_leaf(*loc));
    EXPECT_EQ(st.string_depth(*loc), 2u);
    EXPECT_EQ(st.leaf_count(*loc), 2u);
    // "b" reaches an internal node: b# twice, b$ once; only b$ extends.
    const auto lb = st.locus(encode("b"));
    ASSERT_TRUE(lb);
    EXPECT_EQ(st.leaf_count(*lb), 3u);
    EXPECT_FALSE(st.locus(std::vector<Symbol>{sym[1], kHash}).has_value());
}

TEST(SuffixTree, SerializationRoundTrip) {
    const auto b = build_all("mississippi");
    BinaryWriter w;
    b.st.write(w);
    BinaryReader r(w.bytes());
    const auto back = SuffixTree::read(r);
    EXPECT_TRUE(r.at_end());
    ASSERT_EQ(back.node_count(), b.st.node_count());
    for (index_t v = 0; v < back.node_count(); ++v) {
        EXPECT_EQ(back.parent(v), b.st.parent(v));
        EXPECT_EQ(back.string_depth(v), b.st.string_depth(v));
        EXPECT_EQ(back.leaf_range(v), b.st.leaf_range(v));
        EXPECT_EQ(back.rleaf(v), b.st.rleaf(v));
    }
    EXPECT_EQ(back.locus(encode("ssi")), b.st.locus(encode("ssi")));

    const std::string bytes = w.bytes();
    BinaryReader cut(std::string_view(bytes).substr(0, bytes.size() / 2));
    EXPECT_THROW(SuffixTree::read(cut), FormatError);
}

TEST(HeavyPath, BananaRootPathEndsAtLastTiedLeaf) {
    const auto b = build_all("banana");
    const auto h = decompose(b.st);
    EXPECT_EQ(h.heavy_child[0], 2u);
    EXPECT_EQ(h.heavy_child[2], 4u);
    EXPECT_EQ(h.heavy_child[4], 6u); // ana$ and anana$ tie; the later child wins
    EXPECT_EQ(h.heavy_child[8], 10u);
    EXPECT_EQ(h.path_leaf[0], 6u);
    EXPECT_EQ(h.head[6], 0u);
    EXPECT_EQ(h.head[4], 0u);
    EXPECT_TRUE(h.is_light(5));
    EXPECT_TRUE(h.is_light(8));
    EXPECT_FALSE(h.is_light(10));
    EXPECT_EQ(h.light_ancestor(10), 8u);
    EXPECT_EQ(h.light_nodes, (std::vector<index_t>{0, 1, 3, 5, 7, 8, 9}));
    EXPECT_EQ(max_light_depth(b.st, h), 3u); // root, na, na$
}

TEST(HeavyPath, LightDepthIsLogarithmic) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng() % 2000;
        const auto s = trial % 2 ? ctxpat::testing::random_string(rng, n, 2) : std::string(n, 'a');
        const auto b = build_all(s);
        const auto h = decompose(b.st);
        const index_t bound = static_cast<index_t>(std::bit_width(b.text.size()));
        ASSERT_LE(max_light_depth(b.st, h), bound) << "n=" << n;
        // Every node's heavy child has the largest leaf count among siblings.
        for (index_t v = 0; v < b.st.node_count(); ++v) {
            for (index_t c : b.st.children(v)) {
                ASSERT_LE(b.st.leaf_count(c), b.st.leaf_count(h.heavy_child[v]));
            }
        }
    }
}

TEST(HeavyPath, SerializationRoundTripAndCorruption) {
    const auto b = build_all("abracadabra");
    const auto h = decompose(b.st);
    BinaryWriter w;
    h.write(w);
    BinaryReader r(w.bytes());
    const auto back = HeavyPathDecomposition::read(r, b.st.node_count());
    EXPECT_EQ(back.heavy_child, h.heavy_child);
    EXPECT_EQ(back.head, h.head);
    EXPECT_EQ(back.path_leaf, h.path_leaf);
    EXPECT_EQ(back.light_nodes, h.light_nodes);
    BinaryReader wrong(w.bytes());
    EXPECT_THROW(HeavyPathDecomposition::read(wrong, b.st.node_count() + 1), FormatError);
}
