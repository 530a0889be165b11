#include "uavcov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uavcov/errors.hpp"

namespace uavcov::geometry {
namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

int orientation(Point o, Point a, Point b) {
  const double c = cross(o, a, b);
  if (c > 0) return 1;
  if (c < 0) return -1;
  return 0;
}

bool within_box(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && within_box(a, b, c)) return true;
  if (o2 == 0 && within_box(a, b, d)) return true;
  if (o3 == 0 && within_box(c, d, a)) return true;
  if (o4 == 0 && within_box(c, d, b)) return true;
  return false;
}

// Relative tolerance for the on-edge test, scaled by the segment length.
bool on_segment(Point p, Point a, Point b) {
  if (!within_box(a, b, p)) return false;
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  return std::abs(cross(a, b, p)) <= 1e-12 * std::max(1.0, len * len);
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw InvalidPolygon("polygon needs at least 3 vertices, got " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = vertices_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidPolygon("vertex " + std::to_string(i) + " is not finite");
    }
    if (p == vertices_[(i + 1) % n]) {
      throw InvalidPolygon("vertices " + std::to_string(i) + " and " + std::to_string((i + 1) % n) +
                           " coincide");
    }
  }
  // Non-adjacent edges must not touch; adjacent edges may only share their
  // common vertex (no folding back onto themselves).
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = vertices_[i];
    const Point b = vertices_[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = vertices_[j];
      const Point d = vertices_[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        const Point shared = (j == i + 1) ? b : a;
        const Point other_first = (j == i + 1) ? a : b;
        const Point other_second = (j == i + 1) ? d : c;
        if (orientation(shared, other_first, other_second) == 0 &&
            (on_segment(other_second, shared, other_first) || on_segment(other_first, shared, other_second))) {
          throw InvalidPolygon("edges " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) {
        throw InvalidPolygon("edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
      }
    }
  }
}

Mbr compute_mbr(const Polygon& polygon) {
  const auto& v = polygon.vertices();
  Mbr box{v.front().x, v.front().y, v.front().x, v.front().y};
  for (const Point& p : v) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  if (!(box.min_x < box.max_x) || !(box.min_y < box.max_y)) {
    throw InvalidPolygon("polygon has zero area bounding box");
  }
  return box;
}

bool point_in_polygon(Point p, const Polygon& polygon) {
  const auto& v = polygon.vertices();
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = v[i];
    const Point& b = v[j];
    if (on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

GridMap rasterize(const Polygon& polygon, int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw ConstraintError("grid dimensions must be positive, got " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
  const Mbr box = compute_mbr(polygon);
  const double cell_w = box.width() / cols;
  const double cell_h = box.height() / rows;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(rows) * cols, 0);
  std::vector<Cell> starts;
  for (int r = 0; r < rows; ++r) {
    const double cy = box.max_y - (r + 0.5) * cell_h;
    for (int c = 0; c < cols; ++c) {
      const double cx = box.min_x + (c + 0.5) * cell_w;
      if (point_in_polygon({cx, cy}, polygon)) {
        mask[static_cast<std::size_t>(r) * cols + c] = 1;
        if (starts.empty()) starts.push_back({r, c});
      }
    }
  }
  if (starts.empty()) {
    throw NoVisitableCells("no cell center of the " + std::to_string(rows) + "x" + std::to_string(cols) +
                           " grid lies inside the polygon");
  }
  return GridMap(rows, cols, std::move(mask), std::move(starts));
}

GridShape shape_for_cell_size(const Mbr& mbr, double cell_size) {
  if (!(cell_size > 0) || !std::isfinite(cell_size)) {
    throw RangeError("cell size must be a positive finite length");
  }
  const double rows = std::ceil(mbr.height() / cell_size);
  const double cols = std::ceil(mbr.width() / cell_size);
  if (rows > 1e6 || cols > 1e6) throw RangeError("cell size produces an unreasonably large grid");
  return {std::max(1, static_cast<int>(rows)), std::max(1, static_cast<int>(cols))};
}

}  // namespace uavcov::geometry
