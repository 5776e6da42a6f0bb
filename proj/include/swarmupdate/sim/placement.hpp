#pragma once

#include <stdexcept>
#include <vector>

#include "swarmupdate/sim/config.hpp"
#include "swarmupdate/sim/frame.hpp"
#include "swarmupdate/sim/geometry.hpp"

namespace swarmupdate::sim {

struct AgentDescriptor {
  AgentId id = 0;
  AgentType uav_type = AgentType::Footbot;
  Vec2 position;
  bool needs_update = false;
};

struct TypeMix {
  /// Share of drones that are Eyebots; the rest are Footbots.
  double eyebot_fraction = 0.5;
  AgentType compatible = AgentType::Eyebot;
};

/// Type of drone `id` (1-based) under `mix`: Eyebot exactly when
/// floor(id * f) steps up from floor((id - 1) * f), which spreads the
/// Eyebots evenly over the id range and yields floor(n * f) of them.
AgentType drone_type(AgentId id, const TypeMix& mix);

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxPlacementAttempts = 1000;

/// Updater (id 0) at the origin plus drones 1..n spread uniformly over a
/// square arena centred on it. Layouts are resampled until the range graph
/// over all agents is connected and the Updater plus the compatible drones
/// also form a connected subgraph on their own.
std::vector<AgentDescriptor> place_swarm(int n, const TypeMix& mix, const WorldConfig& config);

/// Whether the agents selected by `include` (all when empty) form one
/// connected component under the given range.
bool range_connected(const std::vector<AgentDescriptor>& agents, double range, const std::vector<bool>& include = {});

}  // namespace swarmupdate::sim
