#include "swarmupdate/sim/placement.hpp"

#include <cmath>
#include <random>
#include <string>

#include "swarmupdate/sim/spatial_grid.hpp"

namespace swarmupdate::sim {

AgentType drone_type(AgentId id, const TypeMix& mix) {
  const auto now = static_cast<long long>(std::floor(id * mix.eyebot_fraction));
  const auto before = static_cast<long long>(std::floor((id - 1) * mix.eyebot_fraction));
  return now > before ? AgentType::Eyebot : AgentType::Footbot;
}

bool range_connected(const std::vector<AgentDescriptor>& agents, double range, const std::vector<bool>& include) {
  auto in = [&](std::size_t i) { return include.empty() || include[i]; };
  std::vector<Vec2> pts;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (in(i)) {
      pts.push_back(agents[i].position);
      index.push_back(i);
    }
  }
  if (pts.size() <= 1) return true;
  SpatialGrid grid(range);
  grid.rebuild(pts);
  std::vector<bool> seen(pts.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  const double r2 = range * range;
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    grid.for_each_near(pts[cur], [&](std::size_t j) {
      if (!seen[j] && distance_sq(pts[cur], pts[j]) <= r2) {
        seen[j] = true;
        ++reached;
        stack.push_back(j);
      }
    });
  }
  return reached == pts.size();
}

std::vector<AgentDescriptor> place_swarm(int n, const TypeMix& mix, const WorldConfig& config) {
  if (n < 1) throw PlacementError("swarm needs at least one drone");
  if (!(mix.eyebot_fraction >= 0.0 && mix.eyebot_fraction <= 1.0)) {
    throw PlacementError("eyebot fraction must lie in [0, 1]");
  }
  const double side = config.arena_side_m > 0.0 ? config.arena_side_m : default_arena_side(n, config.comm_range_m);
  const double half = side / 2.0;

  std::vector<AgentDescriptor> agents(static_cast<std::size_t>(n) + 1);
  agents[0] = {0, AgentType::Updater, {0.0, 0.0}, false};
  std::vector<bool> compat_or_updater(agents.size(), false);
  compat_or_updater[0] = true;
  for (int i = 1; i <= n; ++i) {
    auto& a = agents[i];
    a.id = i;
    a.uav_type = drone_type(i, mix);
    a.needs_update = a.uav_type == mix.compatible;
    compat_or_updater[i] = a.needs_update;
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> coord(-half, half);
  for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
    for (int i = 1; i <= n; ++i) {
      agents[i].position.x = coord(rng);
      agents[i].position.y = coord(rng);
    }
    if (range_connected(agents, config.comm_range_m) &&
        range_connected(agents, config.comm_range_m, compat_or_updater)) {
      return agents;
    }
  }
  throw PlacementError("no connected layout for " + std::to_string(n) + " drones in a " + std::to_string(side) +
                       " m arena after " + std::to_string(kMaxPlacementAttempts) +
                       " attempts; use a larger comm_range_m or a smaller arena_side_m");
}

}  // namespace swarmupdate::sim
