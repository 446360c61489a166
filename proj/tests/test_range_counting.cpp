#include <gtest/gtest.h>

#include <random>

#include "ctxpat/range_counter.hpp"

using namespace ctxpat;

namespace {

const std::vector<Point<2>> kGrid{{1, 1}, {1, 3}, {2, 2}, {4, 1}, {4, 2}, {5, 3}};

template <std::size_t D>
std::uint64_t scan(const std::vector<Point<D>>& pts, const Rect<D>& q) {
    std::uint64_t c = 0;
    for (const auto& p : pts) {
        bool in = true;
        for (std::size_t d = 0; d < D; ++d) {
            in = in && q[d].contains(p[d]);
        }
        c += in ? 1 : 0;
    }
    return c;
}

template <std::size_t D>
Rect<D> random_rect(std::mt19937_64& rng, coord_t universe) {
    Rect<D> q;
    for (auto& iv : q) {
        switch (rng() % 5) {
        case 0:
            iv = Interval::all();
            break;
        case 1:
            iv = Interval::at_least(static_cast<coord_t>(rng() % universe));
            break;
        case 2:
            iv = Interval::at_most(static_cast<coord_t>(rng() % universe));
            break;
        default: {
            auto a = static_cast<coord_t>(rng() % universe);
            auto b = static_cast<coord_t>(rng() % universe);
            iv = Interval::between(std::min(a, b), std::max(a, b));
        }
        }
    }
    return q;
}

template <std::size_t D>
std::vector<Point<D>> random_points(std::mt19937_64& rng, std::size_t n, coord_t universe) {
    std::vector<Point<D>> pts(n);
    for (auto& p : pts) {
        for (auto& c : p) {
            // A few coordinates at the top of the universe stand in for infinity.
            c = rng() % 17 == 0 ? Interval::kCoordMax - 1 : static_cast<coord_t>(rng() % universe);
        }
    }
    return pts;
}

} // namespace

TEST(RangeCounting, GridFixtureCountsThree) {
    const RangeCounter<2> rc(kGrid);
    EXPECT_EQ(rc.size(), 6u);
    EXPECT_EQ(rc.count({Interval::between(1, 3), Interval::between(1, 3)}), 3u);
    EXPECT_EQ(rc.count({Interval::all(), Interval::all()}), 6u);
    EXPECT_EQ(rc.count({Interval::at_least(4), Interval::at_most(2)}), 2u);
}

TEST(RangeCounting, GridFixtureLiftedToThreeDimensions) {
    PointSet ps{3, {}};
    for (const auto& p : kGrid) {
        ps.points.push_back({p[0], p[1], 0});
    }
    const DynamicRangeCounter rc(ps);
    const std::vector<Interval> q{Interval::between(1, 3), Interval::between(1, 3), Interval::all()};
    EXPECT_EQ(rc.count(q), 3u);
}

TEST(RangeCounting, EmptySetAnswersZero) {
    const RangeCounter<5> rc;
    Rect<5> all{};
    EXPECT_EQ(rc.count(all), 0u);
    EXPECT_EQ(rc.size(), 0u);
    const DynamicRangeCounter dyn(PointSet{3, {}});
    EXPECT_EQ(dyn.count(std::vector<Interval>(3)), 0u);
}

TEST(RangeCounting, EmptyIntervalAnswersZero) {
    const RangeCounter<2> rc(kGrid);
    EXPECT_EQ(rc.count({Interval::at_least(6), Interval::all()}), 0u);
    EXPECT_EQ(rc.count({Interval::between(3, 2), Interval::all()}), 0u);
}

TEST(RangeCounting, DuplicatesCountWithMultiplicity) {
    const RangeCounter<3> rc({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {0, 0, 0}});
    EXPECT_EQ(rc.size(), 4u);
    EXPECT_EQ(rc.distinct_size(), 2u);
    EXPECT_EQ(rc.count({Interval::at_least(1), Interval::all(), Interval::all()}), 3u);
    EXPECT_EQ(rc.count({Interval::all(), Interval::all(), Interval::all()}), 4u);
}

TEST(RangeCounting, ArityMismatchIsRejected) {
    EXPECT_THROW(DynamicRangeCounter(PointSet{3, {{1, 2, 3}, {1, 2}}}), ParameterError);
    EXPECT_THROW(DynamicRangeCounter(PointSet{4, {}}), ParameterError);
    const DynamicRangeCounter rc(PointSet{5, {{1, 2, 3, 4, 5}}});
    EXPECT_THROW(rc.count(std::vector<Interval>(3)), ParameterError);
    EXPECT_EQ(rc.count(std::vector<Interval>(5)), 1u);
}

TEST(RangeCounting, RandomFiveDimensionalAgainstScan) {
    std::mt19937_64 rng(21);
    const auto pts = random_points<5>(rng, 1000, 40);
    const RangeCounter<5> rc(pts);
    for (int q = 0; q < 10000; ++q) {
        const auto rect = random_rect<5>(rng, 45);
        ASSERT_EQ(rc.count(rect), scan(pts, rect)) << "query " << q;
    }
}

TEST(RangeCounting, RandomThreeDimensionalWithHeavyDuplication) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pts = random_points<3>(rng, rng() % 600, 6);
        const RangeCounter<3> rc(pts);
        for (int q = 0; q < 300; ++q) {
            const auto rect = random_rect<3>(rng, 8);
            ASSERT_EQ(rc.count(rect), scan(pts, rect));
        }
    }
}

TEST(RangeCounting, MonotoneAndAdditive) {
    std::mt19937_64 rng(23);
    const auto pts = random_points<3>(rng, 500, 30);
    const RangeCounter<3> rc(pts);
    for (int q = 0; q < 500; ++q) {
        auto rect = random_rect<3>(rng, 30);
        const std::size_t d = rng() % 3;
        if (rect[d].empty()) {
            continue;
        }
        const auto base = rc.count(rect);
        auto wider = rect;
        wider[d].lo = wider[d].lo > 0 ? wider[d].lo - 1 : 0;
        ASSERT_GE(rc.count(wider), base);
        if (rect[d].lo < rect[d].hi) {
            const coord_t split = rect[d].lo + static_cast<coord_t>(rng() % (rect[d].hi - rect[d].lo));
            auto left = rect;
            auto right = rect;
            left[d].hi = split;
            right[d].lo = split + 1;
            ASSERT_EQ(rc.count(left) + rc.count(right), base);
        }
    }
    EXPECT_EQ(rc.count(Rect<3>{}), 500u);
}

TEST(RangeCounting, ForestGroupsAreIndependent) {
    RangeCounterForest<3> f;
    const auto g0 = f.add_group({{1, 1, 1}, {2, 2, 2}});
    const auto g1 = f.add_group({});
    const auto g2 = f.add_group({{1, 1, 1}});
    EXPECT_EQ(f.group_count(), 3u);
    EXPECT_EQ(f.count(g0, Rect<3>{}), 2u);
    EXPECT_EQ(f.count(g1, Rect<3>{}), 0u);
    EXPECT_EQ(f.count(g2, Rect<3>{}), 1u);
    EXPECT_EQ(f.point_count(), 3u);
}

TEST(RangeCounting, SerializationRoundTripAndCorruption) {
    std::mt19937_64 rng(24);
    const auto pts = random_points<5>(rng, 300, 20);
    const RangeCounter<5> rc(pts);
    BinaryWriter w;
    rc.write(w);
    BinaryReader r(w.bytes());
    const auto back = RangeCounter<5>::read(r);
    EXPECT_TRUE(r.at_end());
    for (int q = 0; q < 500; ++q) {
        const auto rect = random_rect<5>(rng, 22);
        ASSERT_EQ(back.count(rect), rc.count(rect));
    }
    const std::string& bytes = w.bytes();
    BinaryReader cut(std::string_view(bytes).substr(0, bytes.size() - 5));
    EXPECT_THROW(RangeCounter<5>::read(cut), FormatError);
}
