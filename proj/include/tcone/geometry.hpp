#pragma once

// Exact planar measure helpers: disk/rectangle intersection area and
// segment clipping against disks and boxes.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

namespace tcone::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Segment {
    Point a;
    Point b;

    [[nodiscard]] double length() const { return std::hypot(b.x - a.x, b.y - a.y); }
};

/// Area of the intersection of the disk B_r(c) with [x0, x1] x [y0, y1].
inline double disk_rect_area(Point c, double r, double x0, double x1, double y0, double y1) {
    if (r <= 0.0) return 0.0;
    // Work in coordinates centred at c.
    x0 -= c.x; x1 -= c.x; y0 -= c.y; y1 -= c.y;
    const double a = std::max(x0, -r);
    const double b = std::min(x1, r);
    if (a >= b || y0 >= r || y1 <= -r) return 0.0;

    const double r2 = r * r;
    auto s = [r2](double x) { return std::sqrt(std::max(0.0, r2 - x * x)); };
    // Antiderivative of s(x).
    auto big_s = [r, r2, &s](double x) {
        const double xc = std::clamp(x, -r, r);
        return 0.5 * (xc * s(xc) + r2 * std::asin(xc / r));
    };

    std::array<double, 6> cuts{};
    std::size_t n_cuts = 0;
    cuts[n_cuts++] = a;
    for (double y : {y0, y1}) {
        if (std::abs(y) < r) {
            const double xb = std::sqrt(r2 - y * y);
            for (double x : {-xb, xb}) {
                if (x > a && x < b) cuts[n_cuts++] = x;
            }
        }
    }
    cuts[n_cuts++] = b;
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(n_cuts));

    double area = 0.0;
    for (std::size_t k = 0; k + 1 < n_cuts; ++k) {
        const double lo = cuts[k];
        const double hi = cuts[k + 1];
        if (hi <= lo) continue;
        const double mid = 0.5 * (lo + hi);
        const double sm = s(mid);
        const bool upper_is_s = sm < y1;
        const bool lower_is_s = -sm > y0;
        const double upper = upper_is_s ? sm : y1;
        const double lower = lower_is_s ? -sm : y0;
        if (upper <= lower) continue;
        double piece = 0.0;
        piece += upper_is_s ? (big_s(hi) - big_s(lo)) : y1 * (hi - lo);
        piece -= lower_is_s ? -(big_s(hi) - big_s(lo)) : y0 * (hi - lo);
        area += piece;
    }
    return area;
}

/// Parameter interval [t0, t1] of a + t (b - a), t in [0, 1], lying inside B_r(c).
inline std::optional<std::pair<double, double>> clip_segment_to_disk(const Segment& s, Point c, double r) {
    const double dx = s.b.x - s.a.x;
    const double dy = s.b.y - s.a.y;
    const double fx = s.a.x - c.x;
    const double fy = s.a.y - c.y;
    const double qa = dx * dx + dy * dy;
    if (qa == 0.0) return std::nullopt;
    const double qb = 2.0 * (fx * dx + fy * dy);
    const double qc = fx * fx + fy * fy - r * r;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double t0 = std::max(0.0, (-qb - sq) / (2.0 * qa));
    const double t1 = std::min(1.0, (-qb + sq) / (2.0 * qa));
    if (t1 <= t0) return std::nullopt;
    return std::make_pair(t0, t1);
}

/// Length of the part of `s` inside B_r(c).
inline double segment_length_in_disk(const Segment& s, Point c, double r) {
    const auto t = clip_segment_to_disk(s, c, r);
    if (!t) return 0.0;
    return (t->second - t->first) * s.length();
}

/// Liang-Barsky clip of a segment to an axis-aligned box.
inline std::optional<Segment> clip_segment_to_box(const Segment& s, double x0, double x1, double y0, double y1) {
    const double dx = s.b.x - s.a.x;
    const double dy = s.b.y - s.a.y;
    double t0 = 0.0;
    double t1 = 1.0;
    const std::array<double, 4> p{-dx, dx, -dy, dy};
    const std::array<double, 4> q{s.a.x - x0, x1 - s.a.x, s.a.y - y0, y1 - s.a.y};
    for (std::size_t k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return std::nullopt;
            continue;
        }
        const double t = q[k] / p[k];
        if (p[k] < 0.0) t0 = std::max(t0, t); else t1 = std::min(t1, t);
        if (t0 > t1) return std::nullopt;
    }
    return Segment{{s.a.x + t0 * dx, s.a.y + t0 * dy}, {s.a.x + t1 * dx, s.a.y + t1 * dy}};
}

}  // namespace tcone::geometry
