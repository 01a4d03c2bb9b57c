#include "safeplan/gridmap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace safeplan {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Point2 origin,
                             std::vector<std::uint8_t> cells)
    : width_(width), height_(height), resolution_(resolution), origin_(origin),
      cells_(std::move(cells))
{
    if (width <= 0 || height <= 0)
        throw MapError("empty map");
    if (!(resolution > 0.0) || !std::isfinite(resolution))
        throw MapError("resolution must be positive");
    if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw MapError("dimension mismatch: cell count does not equal width*height");
    for (auto& c : cells_)
        c = c ? 1 : 0;
}

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Point2 origin)
    : OccupancyGrid(width, height, resolution, origin,
                    std::vector<std::uint8_t>(
                        static_cast<std::size_t>(std::max(width, 0)) *
                        static_cast<std::size_t>(std::max(height, 0)), 0))
{
}

Rect OccupancyGrid::bounds() const
{
    return {origin_.x, origin_.y, origin_.x + width_ * resolution_,
            origin_.y + height_ * resolution_};
}

std::optional<CellIndex> OccupancyGrid::world_to_cell(const Point2& p) const
{
    const double fx = (p.x - origin_.x) / resolution_;
    const double fy = (p.y - origin_.y) / resolution_;
    if (!(fx >= 0.0) || !(fy >= 0.0) || fx >= width_ || fy >= height_)
        return std::nullopt;
    CellIndex c{static_cast<int>(std::floor(fx)), static_cast<int>(std::floor(fy))};
    c.ix = std::min(c.ix, width_ - 1);
    c.iy = std::min(c.iy, height_ - 1);
    return c;
}

Point2 OccupancyGrid::cell_center(CellIndex c) const
{
    return {origin_.x + (c.ix + 0.5) * resolution_, origin_.y + (c.iy + 0.5) * resolution_};
}

bool OccupancyGrid::free_at(const Point2& p) const
{
    const auto c = world_to_cell(p);
    return c && !occupied(*c);
}

std::size_t OccupancyGrid::occupied_count() const
{
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

// ---------------------------------------------------------------------------
// Loading

namespace {

double parse_double(const std::string& token, const char* what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size() || !std::isfinite(v))
            throw MapError(std::string("malformed header: bad ") + what);
        return v;
    } catch (const std::logic_error&) {
        throw MapError(std::string("malformed header: bad ") + what);
    }
}

int parse_int(const std::string& token, const char* what)
{
    int v = 0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw MapError(std::string("malformed header: bad ") + what);
    return v;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

OccupancyGrid load_ascii_map(std::istream& source)
{
    std::string header;
    if (!std::getline(source, header))
        throw MapError("malformed header: empty input");
    std::istringstream hs(header);
    std::vector<std::string> tokens;
    for (std::string t; hs >> t;)
        tokens.push_back(t);
    if (tokens.size() != 5)
        throw MapError("malformed header: expected 'W H resolution origin_x origin_y'");

    const int w = parse_int(tokens[0], "width");
    const int h = parse_int(tokens[1], "height");
    const double res = parse_double(tokens[2], "resolution");
    const Point2 origin{parse_double(tokens[3], "origin_x"), parse_double(tokens[4], "origin_y")};
    if (w < 0 || h < 0)
        throw MapError("malformed header: negative dimension");
    if (w == 0 || h == 0)
        throw MapError("empty map");
    if (!(res > 0.0))
        throw MapError("malformed header: resolution must be positive");

    std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    std::string line;
    for (int row = 0; row < h; ++row) {
        if (!std::getline(source, line))
            throw MapError("dimension mismatch: expected " + std::to_string(h) + " rows, got " +
                           std::to_string(row));
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (static_cast<int>(line.size()) != w)
            throw MapError("dimension mismatch: row " + std::to_string(row) + " has " +
                           std::to_string(line.size()) + " cells, expected " + std::to_string(w));
        const int iy = h - 1 - row;
        for (int ix = 0; ix < w; ++ix) {
            const char ch = line[static_cast<std::size_t>(ix)];
            if (ch != '.' && ch != '#')
                throw MapError(std::string("malformed cell character '") + ch + "'");
            cells[static_cast<std::size_t>(iy) * static_cast<std::size_t>(w) +
                  static_cast<std::size_t>(ix)] = ch == '#' ? 1 : 0;
        }
    }
    while (std::getline(source, line)) {
        if (!trim(line).empty())
            throw MapError("dimension mismatch: trailing rows after grid body");
    }
    return {w, h, res, origin, std::move(cells)};
}

MapMetadata parse_map_metadata(std::istream& sidecar)
{
    MapMetadata meta;
    bool has_res = false, has_ox = false, has_oy = false;
    std::string line;
    while (std::getline(sidecar, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw MapError("malformed metadata line: " + line);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "resolution") {
            meta.resolution = parse_double(value, "resolution");
            has_res = true;
        } else if (key == "origin_x") {
            meta.origin.x = parse_double(value, "origin_x");
            has_ox = true;
        } else if (key == "origin_y") {
            meta.origin.y = parse_double(value, "origin_y");
            has_oy = true;
        } else {
            throw MapError("unknown metadata key: " + key);
        }
    }
    if (!has_res || !has_ox || !has_oy)
        throw MapError("metadata must define resolution, origin_x and origin_y");
    if (!(meta.resolution > 0.0))
        throw MapError("malformed header: resolution must be positive");
    return meta;
}

OccupancyGrid load_pgm_map(std::istream& pgm, const MapMetadata& meta)
{
    // Plain PGM tokens may be separated by any whitespace; '#' starts a comment.
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(pgm, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        for (std::string t; ls >> t;)
            tokens.push_back(t);
    }
    if (tokens.empty() || tokens[0] != "P2") {
        if (!tokens.empty() && tokens[0].size() == 2 && tokens[0][0] == 'P')
            throw MapError("unsupported format: only plain PGM (P2) is accepted");
        throw MapError("malformed header: missing P2 magic");
    }
    if (tokens.size() < 4)
        throw MapError("malformed header: truncated PGM header");
    const int w = parse_int(tokens[1], "width");
    const int h = parse_int(tokens[2], "height");
    const int maxval = parse_int(tokens[3], "maxval");
    if (w < 0 || h < 0)
        throw MapError("malformed header: negative dimension");
    if (w == 0 || h == 0)
        throw MapError("empty map");
    if (maxval <= 0 || maxval > 65535)
        throw MapError("malformed header: maxval out of range");
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (tokens.size() - 4 != n)
        throw MapError("dimension mismatch: expected " + std::to_string(n) + " pixels, got " +
                       std::to_string(tokens.size() - 4));

    std::vector<std::uint8_t> cells(n);
    for (std::size_t k = 0; k < n; ++k) {
        const int value = parse_int(tokens[4 + k], "pixel");
        if (value < 0 || value > maxval)
            throw MapError("pixel value out of range");
        const int row = static_cast<int>(k / static_cast<std::size_t>(w));
        const int ix = static_cast<int>(k % static_cast<std::size_t>(w));
        const int iy = h - 1 - row;
        // dark pixels (below half of maxval) are occupied
        cells[static_cast<std::size_t>(iy) * static_cast<std::size_t>(w) +
              static_cast<std::size_t>(ix)] = 2 * value < maxval ? 1 : 0;
    }
    return {w, h, meta.resolution, meta.origin, std::move(cells)};
}

OccupancyGrid load_map(std::istream& source, MapFormat format, const MapMetadata* meta)
{
    switch (format) {
    case MapFormat::Ascii:
        return load_ascii_map(source);
    case MapFormat::Pgm:
        if (meta == nullptr)
            throw MapError("PGM maps require resolution/origin metadata");
        return load_pgm_map(source, *meta);
    }
    throw MapError("unsupported format");
}

OccupancyGrid load_map(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MapError("cannot open map file: " + path);
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".pgm") {
        std::ifstream side(path + ".meta");
        if (!side)
            throw MapError("cannot open map metadata sidecar: " + path + ".meta");
        const auto meta = parse_map_metadata(side);
        return load_pgm_map(in, meta);
    }
    if (ext == ".txt" || ext == ".map" || ext == ".grid")
        return load_ascii_map(in);
    throw MapError("unsupported format: unknown map extension '" + ext + "'");
}

void write_ascii_map(std::ostream& out, const OccupancyGrid& grid)
{
    std::ostringstream header;
    header.precision(17);
    header << grid.width() << ' ' << grid.height() << ' ' << grid.resolution() << ' '
           << grid.origin().x << ' ' << grid.origin().y << '\n';
    out << header.str();
    for (int iy = grid.height() - 1; iy >= 0; --iy) {
        std::string row(static_cast<std::size_t>(grid.width()), '.');
        for (int ix = 0; ix < grid.width(); ++ix)
            if (grid.occupied({ix, iy}))
                row[static_cast<std::size_t>(ix)] = '#';
        out << row << '\n';
    }
}

// ---------------------------------------------------------------------------
// Map processing

OccupancyGrid inflate(const OccupancyGrid& grid, double ds)
{
    if (!(ds >= 0.0))
        throw std::invalid_argument("inflate: safety distance must be non-negative");
    if (ds == 0.0)
        return grid;

    const double r_cells = ds / grid.resolution();
    const int reach = static_cast<int>(std::floor(r_cells + 1e-9));
    // Offsets whose center-to-center distance is within ds. The small slack
    // keeps exact multiples of the resolution inside the disc.
    std::vector<CellIndex> kernel;
    const double r2 = r_cells * r_cells * (1.0 + 1e-12) + 1e-12;
    for (int dy = -reach; dy <= reach; ++dy)
        for (int dx = -reach; dx <= reach; ++dx)
            if (static_cast<double>(dx * dx + dy * dy) <= r2)
                kernel.push_back({dx, dy});

    OccupancyGrid out = grid;
    for (int iy = 0; iy < grid.height(); ++iy) {
        for (int ix = 0; ix < grid.width(); ++ix) {
            if (!grid.occupied({ix, iy}))
                continue;
            for (const auto& k : kernel) {
                const CellIndex c{ix + k.ix, iy + k.iy};
                if (out.in_grid(c))
                    out.set_occupied(c, true);
            }
        }
    }
    return out;
}

std::vector<LabeledSample> sample_labels(const OccupancyGrid& grid, double spacing)
{
    const Rect b = grid.bounds();
    if (!(spacing > 0.0) || spacing > std::min(b.width(), b.height()))
        throw std::invalid_argument("sample_labels: spacing must be in (0, min map dimension]");

    const auto count = [spacing](double extent) {
        return static_cast<int>(std::floor(extent / spacing + 1e-9));
    };
    const int nx = count(b.width());
    const int ny = count(b.height());
    std::vector<LabeledSample> out;
    out.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        const double y = b.min_y + spacing * (j + 0.5);
        for (int i = 0; i < nx; ++i) {
            const Point2 p{b.min_x + spacing * (i + 0.5), y};
            out.push_back({p, grid.free_at(p) ? 1 : 0});
        }
    }
    return out;
}

std::vector<Region> partition_regions(const OccupancyGrid& grid)
{
    std::vector<Region> regions;
    std::vector<int> label(grid.cells().size(), -1);
    std::vector<std::size_t> stack;
    const double res = grid.resolution();
    const Point2 o = grid.origin();

    for (std::size_t seed = 0; seed < label.size(); ++seed) {
        if (label[seed] >= 0 || grid.cells()[seed] == 0)
            continue;
        Region region;
        region.id = static_cast<int>(regions.size());
        int min_ix = std::numeric_limits<int>::max(), min_iy = min_ix;
        int max_ix = std::numeric_limits<int>::min(), max_iy = max_ix;

        label[seed] = region.id;
        stack.assign(1, seed);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            region.cells.push_back(cur);
            const CellIndex c = grid.cell_of(cur);
            min_ix = std::min(min_ix, c.ix);
            max_ix = std::max(max_ix, c.ix);
            min_iy = std::min(min_iy, c.iy);
            max_iy = std::max(max_iy, c.iy);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const CellIndex n{c.ix + dx, c.iy + dy};
                    if ((dx == 0 && dy == 0) || !grid.in_grid(n) || !grid.occupied(n))
                        continue;
                    const std::size_t ni = grid.index(n);
                    if (label[ni] < 0) {
                        label[ni] = region.id;
                        stack.push_back(ni);
                    }
                }
            }
        }
        std::sort(region.cells.begin(), region.cells.end());
        region.bounding_box = {o.x + min_ix * res, o.y + min_iy * res, o.x + (max_ix + 1) * res,
                               o.y + (max_iy + 1) * res};
        regions.push_back(std::move(region));
    }
    return regions;
}

namespace {

CellIndex clamped_cell(const OccupancyGrid& grid, double fx, double fy)
{
    return {std::clamp(static_cast<int>(std::floor(fx)), 0, grid.width() - 1),
            std::clamp(static_cast<int>(std::floor(fy)), 0, grid.height() - 1)};
}

}  // namespace

bool segment_collision_free(const OccupancyGrid& grid, const Point2& p, const Point2& q)
{
    const Rect b = grid.bounds();
    if (!b.contains(p) || !b.contains(q))
        throw MapError("segment_collision_free: endpoint outside map bounds");

    const double res = grid.resolution();
    const double x0 = (p.x - b.min_x) / res, y0 = (p.y - b.min_y) / res;
    const double x1 = (q.x - b.min_x) / res, y1 = (q.y - b.min_y) / res;

    CellIndex cur = clamped_cell(grid, x0, y0);
    const CellIndex last = clamped_cell(grid, x1, y1);
    if (grid.occupied(cur))
        return false;

    // Grid traversal in cell units (Amanatides & Woo). When the segment crosses
    // a cell corner exactly, both side cells are visited as well.
    const double dx = x1 - x0, dy = y1 - y0;
    const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double t_delta_x = step_x != 0 ? 1.0 / std::abs(dx) : inf;
    const double t_delta_y = step_y != 0 ? 1.0 / std::abs(dy) : inf;
    double t_max_x = inf, t_max_y = inf;
    if (step_x > 0)
        t_max_x = (cur.ix + 1 - x0) / dx;
    else if (step_x < 0)
        t_max_x = (cur.ix - x0) / dx;
    if (step_y > 0)
        t_max_y = (cur.iy + 1 - y0) / dy;
    else if (step_y < 0)
        t_max_y = (cur.iy - y0) / dy;

    const auto blocked = [&grid](CellIndex c) { return grid.in_grid(c) && grid.occupied(c); };

    const int max_steps = std::abs(last.ix - cur.ix) + std::abs(last.iy - cur.iy) + 2;
    for (int n = 0; n < max_steps && !(cur == last); ++n) {
        const double t_next = std::min(t_max_x, t_max_y);
        if (t_next > 1.0)
            break;
        if (t_max_x == t_max_y) {
            if (blocked({cur.ix + step_x, cur.iy}) || blocked({cur.ix, cur.iy + step_y}))
                return false;
            cur.ix += step_x;
            cur.iy += step_y;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
        } else if (t_max_x < t_max_y) {
            cur.ix += step_x;
            t_max_x += t_delta_x;
        } else {
            cur.iy += step_y;
            t_max_y += t_delta_y;
        }
        if (!grid.in_grid(cur))
            break;
        if (grid.occupied(cur))
            return false;
    }
    return !grid.occupied(last);
}

}  // namespace safeplan
