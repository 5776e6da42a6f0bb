#pragma once

#include <memory>

#include "swarmupdate/proto/common.hpp"
#include "swarmupdate/sim/world.hpp"

namespace swarmupdate::proto {

/// Installs gossip controllers. The Updater and every interested drone that
/// holds the full patch broadcast it; the run converges once every
/// interested drone has signalled Converged to the Updater.
std::shared_ptr<RunOutcome> install_gossip(sim::World& world, const ProtocolParams& params, int packets);

/// Whether the agent is currently a broadcaster (Updater included).
bool gossip_rebroadcasting(const sim::Controller& controller);

}  // namespace swarmupdate::proto
