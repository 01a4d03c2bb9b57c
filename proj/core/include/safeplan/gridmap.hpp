#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "safeplan/geometry.hpp"

namespace safeplan {

class MapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MapFormat { Ascii, Pgm };

struct CellIndex {
    int ix = 0;
    int iy = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/*
 * Binary occupancy grid.
 *  - cells are row-major, index = iy * width + ix
 *  - iy grows with world y; cell (0,0) covers [origin, origin + resolution)^2
 *  - immutable after construction, all queries are const
 */
class OccupancyGrid {
public:
    OccupancyGrid(int width, int height, double resolution, Point2 origin,
                  std::vector<std::uint8_t> cells);

    /// All-free grid.
    OccupancyGrid(int width, int height, double resolution, Point2 origin = {});

    int width() const { return width_; }
    int height() const { return height_; }
    double resolution() const { return resolution_; }
    Point2 origin() const { return origin_; }
    Rect bounds() const;

    std::size_t index(CellIndex c) const
    {
        return static_cast<std::size_t>(c.iy) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.ix);
    }
    CellIndex cell_of(std::size_t idx) const
    {
        return {static_cast<int>(idx % static_cast<std::size_t>(width_)),
                static_cast<int>(idx / static_cast<std::size_t>(width_))};
    }

    bool in_grid(CellIndex c) const
    {
        return c.ix >= 0 && c.iy >= 0 && c.ix < width_ && c.iy < height_;
    }
    bool occupied(CellIndex c) const { return cells_[index(c)] != 0; }
    void set_occupied(CellIndex c, bool occ) { cells_[index(c)] = occ ? 1 : 0; }

    /// Cell containing p, or nullopt outside the map (the max edges are outside).
    std::optional<CellIndex> world_to_cell(const Point2& p) const;
    Point2 cell_center(CellIndex c) const;

    /// Points outside the map count as not free.
    bool free_at(const Point2& p) const;

    std::size_t occupied_count() const;
    const std::vector<std::uint8_t>& cells() const { return cells_; }

    friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    double resolution_ = 0.0;
    Point2 origin_;
    std::vector<std::uint8_t> cells_;
};

struct LabeledSample {
    Point2 position;
    int label = 1;  ///< 1 = free, 0 = occupied
};

struct Region {
    int id = 0;
    std::vector<std::size_t> cells;  ///< sorted grid indices
    Rect bounding_box;               ///< world extent of the member cells
};

/// Map metadata carried in the PGM sidecar (`key = value` lines).
struct MapMetadata {
    double resolution = 0.0;
    Point2 origin;
};

OccupancyGrid load_ascii_map(std::istream& source);
OccupancyGrid load_pgm_map(std::istream& pgm, const MapMetadata& meta);
MapMetadata parse_map_metadata(std::istream& sidecar);

/// Reads a map from disk. `.pgm` files take their metadata from `<path>.meta`.
OccupancyGrid load_map(const std::string& path);
OccupancyGrid load_map(std::istream& source, MapFormat format,
                       const MapMetadata* meta = nullptr);

void write_ascii_map(std::ostream& out, const OccupancyGrid& grid);

/// Disc dilation: a cell becomes occupied when its center lies within `ds`
/// of an occupied cell center.
OccupancyGrid inflate(const OccupancyGrid& grid, double ds);

/// Cell-center aligned lattice: first point at origin + spacing/2 per axis,
/// floor(extent / spacing) points per axis.
std::vector<LabeledSample> sample_labels(const OccupancyGrid& grid, double spacing);

/// 8-connected components of occupied cells, ids 0.. in scan order.
std::vector<Region> partition_regions(const OccupancyGrid& grid);

/// True iff every cell the closed segment pq passes through is free.
/// Throws MapError when an endpoint lies outside the map.
bool segment_collision_free(const OccupancyGrid& grid, const Point2& p, const Point2& q);

}  // namespace safeplan
