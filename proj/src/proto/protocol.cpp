#include "swarmupdate/proto/protocol.hpp"

#include "swarmupdate/proto/gossip.hpp"
#include "swarmupdate/proto/soul.hpp"
#include "swarmupdate/proto/swarmsync.hpp"

namespace swarmupdate::proto {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::SwarmSync: return "swarmsync";
    case Strategy::Gossip: return "gossip";
    case Strategy::Soul: return "soul";
  }
  return "?";
}

Strategy parse_strategy(const std::string& text) {
  if (text == "swarmsync") return Strategy::SwarmSync;
  if (text == "gossip") return Strategy::Gossip;
  if (text == "soul") return Strategy::Soul;
  throw sim::ConfigError("unknown strategy '" + text + "' (expected swarmsync, gossip or soul)");
}

std::shared_ptr<RunOutcome> install_protocol(Strategy strategy, sim::World& world, const ProtocolParams& params,
                                             int packets) {
  switch (strategy) {
    case Strategy::SwarmSync: return install_swarmsync(world, params, packets);
    case Strategy::Gossip: return install_gossip(world, params, packets);
    case Strategy::Soul: return install_soul(world, params, packets);
  }
  throw sim::ConfigError("unknown strategy");
}

}  // namespace swarmupdate::proto
