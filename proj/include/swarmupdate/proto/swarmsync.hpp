#pragma once

#include <memory>
#include <vector>

#include "swarmupdate/proto/common.hpp"
#include "swarmupdate/sim/world.hpp"

namespace swarmupdate::proto {

struct SubSwarm {
  sim::AgentType uav_type = sim::AgentType::Eyebot;
  AgentId leader = sim::kNoAgent;
  /// Ascending ids.
  std::vector<AgentId> followers;
};

struct SubSwarmPlan {
  std::vector<SubSwarm> subswarms;
  /// When the compatible set fits around the Updater at once there are no
  /// sub-swarms; the Updater acts as temporary leader for these agents.
  std::vector<AgentId> direct;

  bool empty() const { return subswarms.empty() && direct.empty(); }
};

enum class LeaderRule { LowestId };

/// Groups the compatible agents by type into sub-swarms of at most N + 1
/// members. Each type t gets ceil(|S_t| / (N + 1)) leaders (its lowest ids);
/// the rest go to the nearest leader with spare capacity, capacities kept
/// within one of each other. Throws sim::CapacityError when |S^c| > N * N or
/// more than N leaders would be needed.
SubSwarmPlan partition_subswarms(const std::vector<sim::AgentDescriptor>& agents, int max_concurrent,
                                 LeaderRule rule = LeaderRule::LowestId);

enum class SwarmSyncRole { Updater, Leader, Follower, Direct, Bystander };

/// Installs SwarmSync controllers on every agent of `world`.
std::shared_ptr<RunOutcome> install_swarmsync(sim::World& world, const ProtocolParams& params, int packets);

/// Current role of an agent driven by install_swarmsync.
SwarmSyncRole swarmsync_role(const sim::Controller& controller);

}  // namespace swarmupdate::proto
