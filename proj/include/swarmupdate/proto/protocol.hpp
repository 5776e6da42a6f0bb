#pragma once

#include <memory>
#include <string>

#include "swarmupdate/proto/common.hpp"
#include "swarmupdate/sim/world.hpp"

namespace swarmupdate::proto {

enum class Strategy { SwarmSync, Gossip, Soul };

std::string to_string(Strategy s);
/// Accepts "swarmsync", "gossip" or "soul"; throws sim::ConfigError otherwise.
Strategy parse_strategy(const std::string& text);

std::shared_ptr<RunOutcome> install_protocol(Strategy strategy, sim::World& world, const ProtocolParams& params,
                                             int packets);

}  // namespace swarmupdate::proto
