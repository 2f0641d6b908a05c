#pragma once

#include <algorithm>
#include <ostream>

namespace veridoc {

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle, half-open: covers [x, x+w) × [y, y+h).
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    long long area() const { return static_cast<long long>(w) * h; }
    bool empty() const { return w <= 0 || h <= 0; }

    bool contains(const Rect& o) const {
        return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
    }

    Rect intersect(const Rect& o) const {
        const int nx = std::max(x, o.x);
        const int ny = std::max(y, o.y);
        const int nr = std::min(right(), o.right());
        const int nb = std::min(bottom(), o.bottom());
        if (nr <= nx || nb <= ny) return {nx, ny, 0, 0};
        return {nx, ny, nr - nx, nb - ny};
    }

    friend bool operator==(const Rect&, const Rect&) = default;
    friend std::ostream& operator<<(std::ostream& os, const Rect& r) {
        return os << '(' << r.x << ',' << r.y << ',' << r.w << ',' << r.h << ')';
    }
};

}  // namespace veridoc
