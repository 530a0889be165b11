#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uavcov/grid_map.hpp"

namespace uavcov {

// Encoding order is fixed: it is also the order of the network's outputs.
enum class Action : int { North = 0, South = 1, East = 2, West = 3 };

inline constexpr int kActionCount = 4;
inline constexpr std::array<Action, kActionCount> kAllActions = {Action::North, Action::South,
                                                                 Action::East, Action::West};

inline int action_index(Action a) { return static_cast<int>(a); }
Action action_from_index(int index);
std::string_view action_name(Action a);
Cell displaced(Cell c, Action a);

enum class CellClass { NewCell, VisitedCell, NonVisitable };

std::string_view cell_class_name(CellClass c);

// How the new-cell bonus divides max(rows, cols).
//   RemainingBefore: number of unvisited cells just before the move (the bonus
//     grows as the map fills up).
//   VisitedAfter: visited-cell count including the newly discovered cell.
enum class DenominatorMode { RemainingBefore, VisitedAfter };

struct RewardTable {
  double new_cell_base = 358.74;
  double visited_cell = -31.14;
  double non_visitable = -225.17;
  DenominatorMode denominator = DenominatorMode::RemainingBefore;
};

struct SwarmState {
  std::vector<Cell> positions;
  std::vector<std::uint8_t> visited;  // row-major, same layout as GridMap::mask()
  std::size_t visited_count = 0;
  std::int64_t actions_taken = 0;
  std::int64_t sim_steps = 0;

  int uav_count() const { return static_cast<int>(positions.size()); }
};

struct StepOutcome {
  double reward = 0.0;
  CellClass cell_class = CellClass::NonVisitable;
  Cell new_position;
  double coverage = 0.0;
  bool done = false;
};

struct Budget {
  // Timesteps per episode; one timestep gives every UAV one action.
  std::int64_t max_steps = 0;
  std::optional<std::chrono::duration<double>> wall_clock;
};

// Default step budget: 40 timesteps per visitable cell.
std::int64_t default_step_budget(const GridMap& map);

SwarmState reset(const GridMap& map, int uav_count);

// Moves one UAV. Blocked and off-map moves leave the state untouched apart
// from the action counter. Throws EpisodeFinished once every visitable cell
// has been visited.
StepOutcome step(SwarmState& state, const GridMap& map, int uav, Action action,
                 const RewardTable& rewards = {});

// Reward for discovering a new cell given the counts before the move.
double new_cell_reward(const GridMap& map, std::size_t visited_before, const RewardTable& rewards);

double coverage(const SwarmState& state, const GridMap& map);
bool fully_covered(const SwarmState& state, const GridMap& map);

// Four rows x cols channels, row-major, concatenated: visitability, visited,
// this UAV's position, other UAVs' positions.
std::vector<double> observation(const SwarmState& state, const GridMap& map, int uav);
void observation_into(const SwarmState& state, const GridMap& map, int uav, std::span<double> out);
inline std::size_t observation_size(const GridMap& map) { return 4 * map.cell_count(); }

bool is_terminal(const SwarmState& state, const GridMap& map, const Budget& budget,
                 std::chrono::duration<double> elapsed = std::chrono::duration<double>::zero());

}  // namespace uavcov
