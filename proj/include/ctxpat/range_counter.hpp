#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "ctxpat/common.hpp"
#include "ctxpat/serialize.hpp"

namespace ctxpat {

using coord_t = std::uint32_t;

/// Closed coordinate interval. The full coordinate range stands in for the
/// open bounds: lo = 0 is -inf and hi = kCoordMax is +inf.
struct Interval {
    static constexpr coord_t kCoordMax = std::numeric_limits<coord_t>::max();

    coord_t lo = 0;
    coord_t hi = kCoordMax;

    static constexpr Interval all() { return {}; }
    static constexpr Interval at_least(coord_t a) { return {a, kCoordMax}; }
    static constexpr Interval at_most(coord_t b) { return {0, b}; }
    static constexpr Interval between(coord_t a, coord_t b) { return {a, b}; }

    bool empty() const noexcept { return lo > hi; }
    bool contains(coord_t x) const noexcept { return lo <= x && x <= hi; }
};

template <std::size_t D>
using Point = std::array<coord_t, D>;

template <std::size_t D>
using Rect = std::array<Interval, D>;

/// Many independent k-d trees sharing one point pool and one node pool. Each
/// tree is one group; count() queries a single group.
template <std::size_t D>
class RangeCounterForest {
public:
    static constexpr std::size_t kLeafSize = 8;

    /// Builds a tree over `points` (duplicates allowed) and returns its group id.
    index_t add_group(std::vector<Point<D>> points) {
        std::sort(points.begin(), points.end());
        const auto base = static_cast<index_t>(coords_.size() / D);
        for (std::size_t i = 0; i < points.size();) {
            std::size_t j = i;
            while (j < points.size() && points[j] == points[i]) {
                ++j;
            }
            coords_.insert(coords_.end(), points[i].begin(), points[i].end());
            mult_.push_back(static_cast<index_t>(j - i));
            i = j;
        }
        total_points_ += points.size();
        const auto end = static_cast<index_t>(coords_.size() / D);
        roots_.push_back(end == base ? kNone : build(base, end));
        return static_cast<index_t>(roots_.size() - 1);
    }

    index_t group_count() const noexcept { return static_cast<index_t>(roots_.size()); }
    /// Points added, counting duplicates.
    std::uint64_t point_count() const noexcept { return total_points_; }
    /// Points stored after collapsing duplicates.
    std::uint64_t distinct_point_count() const noexcept { return mult_.size(); }

    std::uint64_t count(index_t group, const Rect<D>& q) const {
        for (const auto& iv : q) {
            if (iv.empty()) {
                return 0;
            }
        }
        const index_t root = roots_.at(group);
        return root == kNone ? 0 : count_node(root, q);
    }

    void write(BinaryWriter& w) const {
        w.put<std::uint64_t>(total_points_);
        w.put_vector(coords_);
        w.put_vector(mult_);
        w.put_vector(roots_);
        w.put_vector(node_begin_);
        w.put_vector(node_end_);
        w.put_vector(node_left_);
        w.put_vector(node_right_);
        w.put_vector(node_weight_);
        w.put_vector(node_box_);
    }

    static RangeCounterForest read(BinaryReader& r) {
        RangeCounterForest f;
        f.total_points_ = r.get<std::uint64_t>();
        f.coords_ = r.get_vector<coord_t>();
        f.mult_ = r.get_vector<index_t>();
        f.roots_ = r.get_vector<index_t>();
        f.node_begin_ = r.get_vector<index_t>();
        f.node_end_ = r.get_vector<index_t>();
        f.node_left_ = r.get_vector<index_t>();
        f.node_right_ = r.get_vector<index_t>();
        f.node_weight_ = r.get_vector<std::uint64_t>();
        f.node_box_ = r.get_vector<coord_t>();
        f.validate();
        return f;
    }

private:
    void validate() const {
        const auto pts = mult_.size();
        const auto nodes = node_begin_.size();
        bool ok = coords_.size() == pts * D && node_end_.size() == nodes && node_left_.size() == nodes &&
                  node_right_.size() == nodes && node_weight_.size() == nodes && node_box_.size() == nodes * 2 * D;
        for (index_t root : roots_) {
            ok = ok && (root == kNone || root < nodes);
        }
        for (std::size_t v = 0; ok && v < nodes; ++v) {
            ok = node_begin_[v] <= node_end_[v] && node_end_[v] <= pts &&
                 (node_left_[v] == kNone || (node_left_[v] > v && node_left_[v] < nodes)) &&
                 (node_right_[v] == kNone || (node_right_[v] > v && node_right_[v] < nodes));
        }
        if (!ok) {
            throw FormatError("corrupt range counter");
        }
    }

    coord_t coord(index_t p, std::size_t d) const { return coords_[static_cast<std::size_t>(p) * D + d]; }

    index_t build(index_t begin, index_t end) {
        const auto id = static_cast<index_t>(node_begin_.size());
        node_begin_.push_back(begin);
        node_end_.push_back(end);
        node_left_.push_back(kNone);
        node_right_.push_back(kNone);
        node_weight_.push_back(0);

        std::array<coord_t, D> lo, hi;
        lo.fill(Interval::kCoordMax);
        hi.fill(0);
        std::uint64_t weight = 0;
        for (index_t p = begin; p < end; ++p) {
            for (std::size_t d = 0; d < D; ++d) {
                lo[d] = std::min(lo[d], coord(p, d));
                hi[d] = std::max(hi[d], coord(p, d));
            }
            weight += mult_[p];
        }
        node_weight_[id] = weight;
        for (std::size_t d = 0; d < D; ++d) {
            node_box_.push_back(lo[d]);
            node_box_.push_back(hi[d]);
        }
        if (end - begin <= kLeafSize) {
            return id;
        }

        std::size_t axis = 0;
        for (std::size_t d = 1; d < D; ++d) {
            if (static_cast<std::uint64_t>(hi[d]) - lo[d] > static_cast<std::uint64_t>(hi[axis]) - lo[axis]) {
                axis = d;
            }
        }
        if (hi[axis] == lo[axis]) {
            return id; // all points identical (cannot happen after collapsing)
        }
        const index_t mid = begin + (end - begin) / 2;
        partition(begin, end, mid, axis);

        const index_t left = build(begin, mid);
        const index_t right = build(mid, end);
        node_left_[id] = left;
        node_right_[id] = right;
        return id;
    }

    // Reorders [begin, end) so that position `mid` holds the median on `axis`.
    void partition(index_t begin, index_t end, index_t mid, std::size_t axis) {
        std::vector<index_t> order(end - begin);
        std::iota(order.begin(), order.end(), begin);
        std::nth_element(order.begin(), order.begin() + (mid - begin), order.end(),
                         [&](index_t a, index_t b) { return coord(a, axis) < coord(b, axis); });
        std::vector<coord_t> c(order.size() * D);
        std::vector<index_t> m(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t d = 0; d < D; ++d) {
                c[i * D + d] = coord(order[i], d);
            }
            m[i] = mult_[order[i]];
        }
        std::copy(c.begin(), c.end(), coords_.begin() + static_cast<std::ptrdiff_t>(begin) * D);
        std::copy(m.begin(), m.end(), mult_.begin() + begin);
    }

    std::uint64_t count_node(index_t v, const Rect<D>& q) const {
        const coord_t* box = &node_box_[static_cast<std::size_t>(v) * 2 * D];
        bool inside = true;
        for (std::size_t d = 0; d < D; ++d) {
            const coord_t lo = box[2 * d];
            const coord_t hi = box[2 * d + 1];
            if (hi < q[d].lo || lo > q[d].hi) {
                return 0;
            }
            inside = inside && q[d].lo <= lo && hi <= q[d].hi;
        }
        if (inside) {
            return node_weight_[v];
        }
        if (node_left_[v] == kNone) {
            std::uint64_t total = 0;
            for (index_t p = node_begin_[v]; p < node_end_[v]; ++p) {
                bool hit = true;
                for (std::size_t d = 0; d < D && hit; ++d) {
                    hit = q[d].contains(coord(p, d));
                }
                total += hit ? mult_[p] : 0;
            }
            return total;
        }
        return count_node(node_left_[v], q) + count_node(node_right_[v], q);
    }

    std::vector<coord_t> coords_;
    std::vector<index_t> mult_;
    std::vector<index_t> roots_;
    std::vector<index_t> node_begin_;
    std::vector<index_t> node_end_;
    std::vector<index_t> node_left_;
    std::vector<index_t> node_right_;
    std::vector<std::uint64_t> node_weight_;
    std::vector<coord_t> node_box_;
    std::uint64_t total_points_ = 0;
};

/// Exact, multiplicity-aware orthogonal range counting over a static multiset.
template <std::size_t D>
class RangeCounter {
public:
    RangeCounter() { forest_.add_group({}); }
    explicit RangeCounter(std::vector<Point<D>> points) { forest_.add_group(std::move(points)); }

    std::uint64_t count(const Rect<D>& q) const { return forest_.count(0, q); }
    std::uint64_t size() const noexcept { return forest_.point_count(); }
    std::uint64_t distinct_size() const noexcept { return forest_.distinct_point_count(); }

    void write(BinaryWriter& w) const { forest_.write(w); }
    static RangeCounter read(BinaryReader& r) {
        RangeCounter rc;
        rc.forest_ = RangeCounterForest<D>::read(r);
        if (rc.forest_.group_count() != 1) {
            throw FormatError("corrupt range counter");
        }
        return rc;
    }

private:
    RangeCounterForest<D> forest_;
};

/// Point multiset whose arity is only known at run time.
struct PointSet {
    std::size_t dimension = 0;
    std::vector<std::vector<coord_t>> points;
};

/// Counter over a PointSet of arity 3 or 5; arity mismatches are ParameterErrors.
class DynamicRangeCounter {
public:
    explicit DynamicRangeCounter(const PointSet& ps) : dim_(ps.dimension) {
        for (const auto& p : ps.points) {
            if (p.size() != dim_) {
                throw ParameterError("point arity does not match the point set dimension");
            }
        }
        if (dim_ == 3) {
            c3_ = std::make_unique<RangeCounter<3>>(convert<3>(ps));
        } else if (dim_ == 5) {
            c5_ = std::make_unique<RangeCounter<5>>(convert<5>(ps));
        } else {
            throw ParameterError("unsupported dimension " + std::to_string(dim_));
        }
    }

    std::size_t dimension() const noexcept { return dim_; }

    std::uint64_t count(std::span<const Interval> q) const {
        if (q.size() != dim_) {
            throw ParameterError("query arity does not match the counter");
        }
        if (dim_ == 3) {
            return c3_->count(to_rect<3>(q));
        }
        return c5_->count(to_rect<5>(q));
    }

private:
    template <std::size_t D>
    static std::vector<Point<D>> convert(const PointSet& ps) {
        std::vector<Point<D>> out(ps.points.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            std::copy(ps.points[i].begin(), ps.points[i].end(), out[i].begin());
        }
        return out;
    }

    template <std::size_t D>
    static Rect<D> to_rect(std::span<const Interval> q) {
        Rect<D> r;
        std::copy(q.begin(), q.end(), r.begin());
        return r;
    }

    std::size_t dim_;
    std::unique_ptr<RangeCounter<3>> c3_;
    std::unique_ptr<RangeCounter<5>> c5_;
};

} // namespace ctxpat
