#include "uavcov/grid_map.hpp"

#include <algorithm>
#include <string>

#include "uavcov/errors.hpp"

namespace uavcov {

GridMap::GridMap(int rows, int cols, std::vector<std::uint8_t> mask, std::vector<Cell> starts)
    : rows_(rows), cols_(cols), visitable_(std::move(mask)), starts_(std::move(starts)) {
  if (rows_ < 1 || cols_ < 1) {
    throw ConstraintError("grid dimensions must be positive, got " + std::to_string(rows_) + "x" +
                          std::to_string(cols_));
  }
  if (visitable_.size() != static_cast<std::size_t>(rows_) * cols_) {
    throw ConstraintError("visitability mask has " + std::to_string(visitable_.size()) +
                          " entries, expected " + std::to_string(rows_ * cols_));
  }
  for (auto& v : visitable_) v = v ? 1 : 0;
  visitable_count_ = static_cast<std::size_t>(std::count(visitable_.begin(), visitable_.end(), 1));
  if (visitable_count_ == 0) throw NoVisitableCells("map has no visitable cell");
  if (starts_.empty()) throw ConstraintError("map has no start cell");
  for (const Cell& s : starts_) {
    if (!visitable(s)) {
      throw ConstraintError("start cell (" + std::to_string(s.row) + ", " + std::to_string(s.col) +
                            ") is not visitable");
    }
  }
}

GridMap GridMap::open(int rows, int cols, Cell start) {
  return GridMap(rows, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(rows, 0)) *
                                                           static_cast<std::size_t>(std::max(cols, 0)),
                                                       1),
                 {start});
}

Cell GridMap::start_for(int uav) const {
  if (uav >= 0 && static_cast<std::size_t>(uav) < starts_.size()) return starts_[uav];
  return starts_.front();
}

}  // namespace uavcov
