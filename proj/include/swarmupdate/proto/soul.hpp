#pragma once

#include <memory>
#include <vector>

#include "swarmupdate/proto/common.hpp"
#include "swarmupdate/sim/world.hpp"

namespace swarmupdate::proto {

/// Splits the compatible drones, in id order, into ceil(|S^c| / group_size)
/// groups whose sizes differ by at most one.
std::vector<std::vector<AgentId>> soul_groups(const std::vector<sim::AgentDescriptor>& agents, int group_size);

/// Installs the auctioneer (Updater) and bidder (drone) controllers.
std::shared_ptr<RunOutcome> install_soul(sim::World& world, const ProtocolParams& params, int packets);

}  // namespace swarmupdate::proto
