#include "safeplan/render.hpp"

#include <cmath>
#include <cstdint>
#include <map>

#include <fmt/format.h>

namespace safeplan {

namespace {

using EdgeKey = std::int64_t;

struct Segment {
    EdgeKey a;
    EdgeKey b;
};

}  // namespace

std::vector<Polyline> marching_squares(std::span<const double> values, int nx, int ny,
                                       Point2 origin, double step)
{
    std::vector<Polyline> out;
    if (nx < 2 || ny < 2 || values.size() != static_cast<std::size_t>(nx) * ny)
        return out;

    auto at = [&](int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; };
    auto inside = [&](int i, int j) { return at(i, j) < 0.0; };
    auto hkey = [&](int i, int j) { return (static_cast<EdgeKey>(j) * nx + i) * 2; };
    auto vkey = [&](int i, int j) { return (static_cast<EdgeKey>(j) * nx + i) * 2 + 1; };

    std::map<EdgeKey, Point2> vertex;
    auto crossing = [&](EdgeKey key) {
        if (vertex.count(key))
            return;
        const EdgeKey cell = key / 2;
        const int i = static_cast<int>(cell % nx);
        const int j = static_cast<int>(cell / nx);
        const int i1 = (key % 2 == 0) ? i + 1 : i;
        const int j1 = (key % 2 == 0) ? j : j + 1;
        const double v0 = at(i, j);
        const double v1 = at(i1, j1);
        const double t = v0 / (v0 - v1);
        vertex[key] = {origin.x + (i + t * (i1 - i)) * step, origin.y + (j + t * (j1 - j)) * step};
    };

    std::vector<Segment> segments;
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            // corners: 0 bottom-left, 1 bottom-right, 2 top-right, 3 top-left
            const bool c0 = inside(i, j), c1 = inside(i + 1, j);
            const bool c2 = inside(i + 1, j + 1), c3 = inside(i, j + 1);
            const EdgeKey bottom = hkey(i, j), top = hkey(i, j + 1);
            const EdgeKey left = vkey(i, j), right = vkey(i + 1, j);
            std::vector<EdgeKey> cut;
            if (c0 != c1) cut.push_back(bottom);
            if (c1 != c2) cut.push_back(right);
            if (c3 != c2) cut.push_back(top);
            if (c0 != c3) cut.push_back(left);
            for (const EdgeKey k : cut)
                crossing(k);
            if (cut.size() == 2) {
                segments.push_back({cut[0], cut[1]});
            } else if (cut.size() == 4) {
                const double centre =
                    0.25 * (at(i, j) + at(i + 1, j) + at(i + 1, j + 1) + at(i, j + 1));
                if ((centre < 0.0) == c0) {
                    // c0 and c2 joined through the center; cut off c1 and c3
                    segments.push_back({bottom, right});
                    segments.push_back({top, left});
                } else {
                    segments.push_back({bottom, left});
                    segments.push_back({right, top});
                }
            }
        }
    }

    std::map<EdgeKey, std::vector<std::size_t>> by_key;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        by_key[segments[s].a].push_back(s);
        by_key[segments[s].b].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);

    // Follow unused segments from `key`, appending vertices; returns the last key.
    auto walk = [&](EdgeKey key, std::vector<EdgeKey>& chain) {
        while (true) {
            bool moved = false;
            for (const std::size_t s : by_key[key]) {
                if (used[s])
                    continue;
                used[s] = true;
                key = segments[s].a == key ? segments[s].b : segments[s].a;
                chain.push_back(key);
                moved = true;
                break;
            }
            if (!moved)
                return;
        }
    };

    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s])
            continue;
        used[s] = true;
        std::vector<EdgeKey> forward{segments[s].a, segments[s].b};
        walk(segments[s].b, forward);
        Polyline line;
        if (forward.size() > 2 && forward.front() == forward.back()) {
            forward.pop_back();
            line.closed = true;
        } else {
            std::vector<EdgeKey> backward;
            walk(segments[s].a, backward);
            forward.insert(forward.begin(), backward.rbegin(), backward.rend());
        }
        for (const EdgeKey k : forward)
            line.points.push_back(vertex[k]);
        out.push_back(std::move(line));
    }
    return out;
}

std::vector<Polyline> barrier_contours(const BarrierFunction& bf, const OccupancyGrid& grid)
{
    const double res = grid.resolution();
    const Point2 o = grid.origin();
    const int i0 = std::max(0, static_cast<int>(std::ceil((bf.window.min_x - o.x) / res - 0.5)));
    const int j0 = std::max(0, static_cast<int>(std::ceil((bf.window.min_y - o.y) / res - 0.5)));
    const int i1 =
        std::min(grid.width() - 1, static_cast<int>(std::floor((bf.window.max_x - o.x) / res - 0.5)));
    const int j1 = std::min(grid.height() - 1,
                            static_cast<int>(std::floor((bf.window.max_y - o.y) / res - 0.5)));
    const int nx = i1 - i0 + 1;
    const int ny = j1 - j0 + 1;
    if (nx < 2 || ny < 2)
        return {};
    const Point2 first = grid.cell_center({i0, j0});
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            values.push_back(eval_h(bf, first.x + i * res, first.y + j * res));
    return marching_squares(values, nx, ny, first, res);
}

namespace {

constexpr double kPxPerMeter = 50.0;

struct Page {
    Rect world;
    double px(double x) const { return (x - world.min_x) * kPxPerMeter; }
    double py(double y) const { return (world.max_y - y) * kPxPerMeter; }
};

std::string points_attr(const Page& page, const std::vector<Point2>& pts)
{
    std::string s;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k)
            s += ' ';
        s += fmt::format("{:.2f},{:.2f}", page.px(pts[k].x), page.py(pts[k].y));
    }
    return s;
}

}  // namespace

std::string render_svg(const OccupancyGrid& map, const RenderLayers& layers)
{
    const Page page{map.bounds()};
    const double w = map.width() * map.resolution() * kPxPerMeter;
    const double h = map.height() * map.resolution() * kPxPerMeter;
    const double cell = map.resolution() * kPxPerMeter;

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.2f}\" height=\"{:.2f}\" "
        "viewBox=\"0 0 {:.2f} {:.2f}\">\n",
        w, h, w, h);

    svg += "<g id=\"map\">\n";
    svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"white\" "
                       "stroke=\"black\"/>\n",
                       w, h);
    // one rect per horizontal run of occupied cells
    for (int iy = 0; iy < map.height(); ++iy) {
        int ix = 0;
        while (ix < map.width()) {
            if (!map.occupied({ix, iy})) {
                ++ix;
                continue;
            }
            const int start = ix;
            while (ix < map.width() && map.occupied({ix, iy}))
                ++ix;
            svg += fmt::format(
                "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
                "fill=\"#444\"/>\n",
                start * cell, h - (iy + 1) * cell, (ix - start) * cell, cell);
        }
    }
    svg += "</g>\n";

    if (layers.barriers) {
        svg += "<g id=\"barriers\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\">\n";
        for (const auto& bf : *layers.barriers) {
            for (const auto& line : barrier_contours(bf, map)) {
                svg += fmt::format("<{} data-region=\"{}\" points=\"{}\"/>\n",
                                   line.closed ? "polygon" : "polyline", bf.region_id,
                                   points_attr(page, line.points));
            }
        }
        svg += "</g>\n";
    }

    if (layers.tree) {
        svg += "<g id=\"tree\" stroke=\"#1f77b4\" stroke-width=\"0.8\">\n";
        for (const auto& e : *layers.tree) {
            svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n",
                               page.px(e.from.x), page.py(e.from.y), page.px(e.to.x),
                               page.py(e.to.y));
        }
        svg += "</g>\n";
    }

    if (layers.path) {
        std::vector<Point2> pts;
        for (const auto& wp : *layers.path)
            pts.push_back(wp.state.position());
        svg += "<g id=\"path\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2.5\">\n";
        svg += fmt::format("<polyline points=\"{}\"/>\n", points_attr(page, pts));
        svg += "</g>\n";
    }

    if (layers.trajectory) {
        std::vector<Point2> pts;
        for (const auto& s : layers.trajectory->samples)
            pts.push_back(s.state.position());
        svg += "<g id=\"trajectory\" fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"1.5\">\n";
        svg += fmt::format("<polyline points=\"{}\"/>\n", points_attr(page, pts));
        svg += "</g>\n";
    }

    svg += "</svg>\n";
    return svg;
}

}  // namespace safeplan
