#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace uavcov {

// Row 0 is the northern edge of the map, column 0 the western edge.
struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Rasterized field: a rows x cols mask of visitable cells plus the cells UAVs
// take off from. Construction validates the invariants, so a GridMap that
// exists is always usable by the environment.
class GridMap {
 public:
  GridMap(int rows, int cols, std::vector<std::uint8_t> visitable, std::vector<Cell> starts);

  // Fully visitable rows x cols map with a single start.
  static GridMap open(int rows, int cols, Cell start = {0, 0});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t cell_count() const { return visitable_.size(); }
  std::size_t visitable_count() const { return visitable_count_; }

  bool in_bounds(Cell c) const { return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_; }
  bool visitable(Cell c) const { return in_bounds(c) && visitable_[index(c)] != 0; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * cols_ + c.col; }
  Cell cell_at(std::size_t index) const {
    return {static_cast<int>(index / cols_), static_cast<int>(index % cols_)};
  }

  const std::vector<std::uint8_t>& mask() const { return visitable_; }
  const std::vector<Cell>& starts() const { return starts_; }

  // UAV i launches from starts()[i]; UAVs beyond the listed starts share the
  // first one.
  Cell start_for(int uav) const;

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  int rows_;
  int cols_;
  std::vector<std::uint8_t> visitable_;
  std::vector<Cell> starts_;
  std::size_t visitable_count_ = 0;
};

}  // namespace uavcov
