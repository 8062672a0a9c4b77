#ifndef ADVFLOW_INTERVAL_UNION_HPP
#define ADVFLOW_INTERVAL_UNION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace advflow {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo;
    double hi;

    double length() const noexcept { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Finite union of disjoint intervals, kept sorted with hi_i < lo_{i+1}.
// Endpoints carry no measure, so open/closed is not tracked.
class IntervalUnion {
public:
    IntervalUnion() = default;

    // Accepts any list; empty pieces are dropped and overlapping or touching
    // pieces are merged.
    explicit IntervalUnion(std::vector<Interval> pieces) {
        for (const auto& p : pieces)
            if (std::isnan(p.lo) || std::isnan(p.hi)) throw ConfigError("interval union: NaN endpoint");
        std::erase_if(pieces, [](const Interval& p) { return !(p.hi > p.lo); });
        std::sort(pieces.begin(), pieces.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (const auto& p : pieces) {
            if (!items_.empty() && p.lo <= items_.back().hi)
                items_.back().hi = std::max(items_.back().hi, p.hi);
            else
                items_.push_back(p);
        }
    }

    static IntervalUnion real_line() { return IntervalUnion({{-inf, inf}}); }

    const std::vector<Interval>& intervals() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const Interval& operator[](std::size_t i) const { return items_[i]; }

    double measure() const noexcept {
        double m = 0.0;
        for (const auto& p : items_) m += p.length();
        return m;
    }

    bool contains(double x) const noexcept {
        for (const auto& p : items_)
            if (x >= p.lo && x <= p.hi) return true;
        return false;
    }

    IntervalUnion complement() const {
        std::vector<Interval> out;
        double start = -inf;
        for (const auto& p : items_) {
            if (p.lo > start) out.push_back({start, p.lo});
            start = p.hi;
        }
        if (start < inf) out.push_back({start, inf});
        return IntervalUnion(std::move(out));
    }

    IntervalUnion intersect(const IntervalUnion& other) const {
        std::vector<Interval> out;
        std::size_t i = 0, j = 0;
        while (i < items_.size() && j < other.items_.size()) {
            const Interval& a = items_[i];
            const Interval& b = other.items_[j];
            const double lo = std::max(a.lo, b.lo);
            const double hi = std::min(a.hi, b.hi);
            if (hi > lo) out.push_back({lo, hi});
            if (a.hi < b.hi) ++i;
            else ++j;
        }
        return IntervalUnion(std::move(out));
    }

    IntervalUnion unite(const IntervalUnion& other) const {
        std::vector<Interval> all = items_;
        all.insert(all.end(), other.items_.begin(), other.items_.end());
        return IntervalUnion(std::move(all));
    }

    friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

private:
    std::vector<Interval> items_;
};

inline double symmetric_difference_measure(const IntervalUnion& a, const IntervalUnion& b) {
    return a.intersect(b.complement()).measure() + b.intersect(a.complement()).measure();
}

// A^s: dilation by s when s >= 0, erosion by |s| when s < 0. Pieces whose
// length is at most 2|s| disappear under erosion.
inline IntervalUnion erode_dilate(const IntervalUnion& a, double s) {
    std::vector<Interval> out;
    out.reserve(a.size());
    if (s >= 0.0) {
        for (const auto& p : a.intervals()) out.push_back({p.lo - s, p.hi + s});
    } else {
        const double r = -s;
        for (const auto& p : a.intervals()) {
            if (p.length() <= 2.0 * r) continue;
            out.push_back({p.lo + r, p.hi - r});
        }
    }
    return IntervalUnion(std::move(out));
}

}  // namespace advflow

#endif  // ADVFLOW_INTERVAL_UNION_HPP
