#include "uavcov/gridworld.hpp"

#include <algorithm>
#include <string>

#include "uavcov/errors.hpp"

namespace uavcov {

Action action_from_index(int index) {
  if (index < 0 || index >= kActionCount) {
    throw RangeError("action index " + std::to_string(index) + " out of range");
  }
  return static_cast<Action>(index);
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::North: return "N";
    case Action::South: return "S";
    case Action::East: return "E";
    case Action::West: return "W";
  }
  return "?";
}

std::string_view cell_class_name(CellClass c) {
  switch (c) {
    case CellClass::NewCell: return "new";
    case CellClass::VisitedCell: return "visited";
    case CellClass::NonVisitable: return "blocked";
  }
  return "?";
}

Cell displaced(Cell c, Action a) {
  switch (a) {
    case Action::North: return {c.row - 1, c.col};
    case Action::South: return {c.row + 1, c.col};
    case Action::East: return {c.row, c.col + 1};
    case Action::West: return {c.row, c.col - 1};
  }
  return c;
}

std::int64_t default_step_budget(const GridMap& map) {
  return 40 * static_cast<std::int64_t>(map.visitable_count());
}

SwarmState reset(const GridMap& map, int uav_count) {
  if (uav_count < 1) throw RangeError("uav count must be at least 1");
  SwarmState state;
  state.visited.assign(map.cell_count(), 0);
  state.positions.reserve(uav_count);
  for (int i = 0; i < uav_count; ++i) {
    const Cell start = map.start_for(i);
    state.positions.push_back(start);
    auto& flag = state.visited[map.index(start)];
    if (!flag) {
      flag = 1;
      ++state.visited_count;
    }
  }
  for (const Cell& s : map.starts()) {
    auto& flag = state.visited[map.index(s)];
    if (!flag) {
      flag = 1;
      ++state.visited_count;
    }
  }
  return state;
}

double new_cell_reward(const GridMap& map, std::size_t visited_before, const RewardTable& rewards) {
  const double span = std::max(map.rows(), map.cols());
  const double denominator = rewards.denominator == DenominatorMode::RemainingBefore
                                 ? static_cast<double>(map.visitable_count() - visited_before)
                                 : static_cast<double>(visited_before + 1);
  return rewards.new_cell_base * (1.0 + span / denominator);
}

StepOutcome step(SwarmState& state, const GridMap& map, int uav, Action action, const RewardTable& rewards) {
  if (uav < 0 || uav >= state.uav_count()) {
    throw RangeError("uav index " + std::to_string(uav) + " out of range");
  }
  if (fully_covered(state, map)) throw EpisodeFinished("every visitable cell is already visited");

  ++state.actions_taken;
  Cell& position = state.positions[uav];
  const Cell target = displaced(position, action);
  StepOutcome out;
  if (!map.visitable(target)) {
    out.reward = rewards.non_visitable;
    out.cell_class = CellClass::NonVisitable;
  } else if (state.visited[map.index(target)]) {
    position = target;
    out.reward = rewards.visited_cell;
    out.cell_class = CellClass::VisitedCell;
  } else {
    out.reward = new_cell_reward(map, state.visited_count, rewards);
    position = target;
    state.visited[map.index(target)] = 1;
    ++state.visited_count;
    out.cell_class = CellClass::NewCell;
  }
  out.new_position = position;
  out.coverage = coverage(state, map);
  out.done = fully_covered(state, map);
  return out;
}

double coverage(const SwarmState& state, const GridMap& map) {
  return static_cast<double>(state.visited_count) / static_cast<double>(map.visitable_count());
}

bool fully_covered(const SwarmState& state, const GridMap& map) {
  return state.visited_count == map.visitable_count();
}

void observation_into(const SwarmState& state, const GridMap& map, int uav, std::span<double> out) {
  const std::size_t n = map.cell_count();
  if (out.size() != 4 * n) throw DimensionMismatch("observation buffer has the wrong length");
  std::fill(out.begin(), out.end(), 0.0);
  const auto& mask = map.mask();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = mask[i] ? 1.0 : 0.0;
    out[n + i] = state.visited[i] ? 1.0 : 0.0;
  }
  for (int j = 0; j < state.uav_count(); ++j) {
    const std::size_t idx = map.index(state.positions[j]);
    if (j == uav) {
      out[2 * n + idx] = 1.0;
    } else {
      out[3 * n + idx] = 1.0;
    }
  }
}

std::vector<double> observation(const SwarmState& state, const GridMap& map, int uav) {
  if (uav < 0 || uav >= state.uav_count()) {
    throw RangeError("uav index " + std::to_string(uav) + " out of range");
  }
  std::vector<double> out(observation_size(map));
  observation_into(state, map, uav, out);
  return out;
}

bool is_terminal(const SwarmState& state, const GridMap& map, const Budget& budget,
                 std::chrono::duration<double> elapsed) {
  if (fully_covered(state, map)) return true;
  if (state.sim_steps >= budget.max_steps) return true;
  return budget.wall_clock && elapsed >= *budget.wall_clock;
}

}  // namespace uavcov
