#pragma once

#include <vector>

namespace oracle {

struct CoverageSearch {
  int min_length = -1;  // -1 when no sequence within the depth limit covers the grid
  std::vector<std::vector<int>> optimal;  // action indices 0..3 = N, S, E, W
};

// Exhaustive search on an open rows x cols grid from (0, 0), single agent,
// over every action sequence up to max_depth.
CoverageSearch search_open_grid(int rows, int cols, int max_depth);

}  // namespace oracle
