#pragma once

#include <vector>

#include "uavcov/grid_map.hpp"

namespace uavcov::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Simple closed polygon in planar meters. The closing edge from the last
// vertex back to the first is implicit. Throws InvalidPolygon when there are
// fewer than 3 vertices, repeated consecutive vertices (including an explicit
// closing vertex) or self-intersecting edges.
class Polygon {
 public:
  explicit Polygon(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

 private:
  std::vector<Point> vertices_;
};

// Axis-aligned minimum bounding rectangle.
struct Mbr {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }

  friend bool operator==(const Mbr&, const Mbr&) = default;
};

Mbr compute_mbr(const Polygon& polygon);

// Even-odd membership. Points on an edge or vertex count as inside.
bool point_in_polygon(Point p, const Polygon& polygon);

// Splits the polygon's MBR into rows x cols equal cells. A cell is visitable
// iff its center lies inside the polygon. Row 0 is the top (max_y) strip.
// The returned map starts at the first visitable cell in row-major order;
// callers with explicit starts rebuild the map with them.
// Throws NoVisitableCells when no cell center falls inside.
GridMap rasterize(const Polygon& polygon, int rows, int cols);

struct GridShape {
  int rows = 0;
  int cols = 0;
};

// rows/cols needed to tile the MBR with cells of at most `cell_size` meters,
// by ceiling division.
GridShape shape_for_cell_size(const Mbr& mbr, double cell_size);

}  // namespace uavcov::geometry
