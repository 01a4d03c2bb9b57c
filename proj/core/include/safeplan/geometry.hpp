#pragma once

#include <cmath>
#include <numbers>

namespace safeplan {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b)
{
    return std::hypot(b.x - a.x, b.y - a.y);
}

/// Axis-aligned rectangle in world coordinates, [min_x, max_x] x [min_y, max_y].
struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    bool contains(const Point2& p) const
    {
        return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }

    Rect expanded(double margin) const
    {
        return {min_x - margin, min_y - margin, max_x + margin, max_y + margin};
    }

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a)
{
    if (a > -std::numbers::pi && a <= std::numbers::pi)
        return a;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(a + std::numbers::pi, two_pi);
    if (w < 0.0)
        w += two_pi;
    w -= std::numbers::pi;
    // fmod maps +pi to -pi; the half-open interval keeps +pi
    if (w <= -std::numbers::pi)
        w = std::numbers::pi;
    return w;
}

}  // namespace safeplan
