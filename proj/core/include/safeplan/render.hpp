#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "safeplan/barrier.hpp"
#include "safeplan/csv_io.hpp"
#include "safeplan/gridmap.hpp"

namespace safeplan {

struct Polyline {
    std::vector<Point2> points;
    bool closed = false;  ///< last point connects back to the first
};

/// Zero-level set of a sampled scalar field. `values` is row-major with
/// `nx` samples per row; sample (i, j) sits at origin + (i, j) * step.
/// Crossing vertices are linearly interpolated along lattice edges and shared
/// between neighboring squares, so segments stitch into polylines. Saddles
/// are split by the mean of the four corners.
std::vector<Polyline> marching_squares(std::span<const double> values, int nx, int ny,
                                       Point2 origin, double step);

/// h = 0 contours of one barrier sampled at the map's cell centers inside
/// the barrier's window.
std::vector<Polyline> barrier_contours(const BarrierFunction& bf, const OccupancyGrid& grid);

struct RenderLayers {
    std::optional<std::vector<BarrierFunction>> barriers;
    std::optional<std::vector<TreeEdge>> tree;
    std::optional<std::vector<Waypoint>> path;
    std::optional<Trajectory> trajectory;
};

/// SVG document with one <g> per present layer, in the order map, barriers,
/// tree, path, trajectory. World y points up on the page.
std::string render_svg(const OccupancyGrid& map, const RenderLayers& layers);

}  // namespace safeplan
