#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "swarmupdate/sim/world.hpp"

namespace swarmupdate::proto {

using sim::AgentContext;
using sim::AgentId;
using sim::Frame;
using sim::Inbox;
using sim::SignalType;

/// Knobs shared by the three protocols.
struct ProtocolParams {
  /// N: agents that can surround the Updater at once.
  int max_concurrent = 18;
  /// Silence, in steps, after which an awaited response counts as lost.
  int timeout_steps = 60;
  int quiescence_steps = 20;
  int group_size = 18;
  /// Gossip: packet silence after which a node with gaps asks again.
  int request_silence_steps = 20;
  /// SOUL: steps to wait past the expected end of a round before re-asking.
  int rerequest_steps = 10;
  /// SwarmSync followers close in to this fraction of the range around
  /// their leader's home before the leader starts distributing.
  double gather_fraction = 0.6;

  void validate() const;
};

class PacketBitmap {
 public:
  explicit PacketBitmap(std::size_t size = 0) : bits_(size, false) {}

  void resize(std::size_t size) {
    bits_.assign(size, false);
    count_ = 0;
  }
  /// Returns true when the bit was not already set.
  bool set(std::size_t i);
  bool test(std::size_t i) const { return i < bits_.size() && bits_[i]; }
  bool full() const { return count_ == bits_.size(); }
  std::size_t count() const { return count_; }
  std::size_t size() const { return bits_.size(); }
  std::vector<std::int32_t> missing() const;

 private:
  std::vector<bool> bits_;
  std::size_t count_ = 0;
};

/// Remembers which flooded signals an agent has already passed on.
class FloodMemory {
 public:
  /// True the first time a given (type, origin, subject, value) is seen.
  bool first_time(const Frame& f);
  /// Marks a signal this agent originates so its echo is not relayed.
  void remember(const Frame& f) { first_time(f); }

 private:
  std::set<std::tuple<SignalType, AgentId, AgentId, std::int64_t>> seen_;
};

/// Re-broadcast a flooded signal under this agent's id.
void relay(AgentContext& ctx, const Frame& f);

/// What the runner inspects after a run.
struct DroneStatus {
  bool needs_update = false;
  std::uint32_t packets_held = 0;
  bool applied = false;
  bool evicted = false;
  bool aborted = false;
  /// Steps of the first and last packet reception; -1 when none.
  std::int64_t first_rx_step = -1;
  std::int64_t last_rx_step = -1;
  /// Agent this one received the update from, when not the Updater.
  AgentId upstream = sim::kNoAgent;
};

/// Shared result of a run, written by the protocol controllers.
struct RunOutcome {
  bool converged = false;
  bool updater_aborted = false;
  std::int64_t convergence_step = -1;
  /// Agents that have given up after hearing or raising Abort.
  std::int64_t aborted_agents = 0;
  /// Recipients dropped after missing a deadline.
  std::vector<AgentId> evicted;
};

class ProtocolAgent : public sim::Controller {
 public:
  virtual DroneStatus status() const = 0;
};

/// Steps a drone may need to fly anywhere in the placed swarm:
/// ceil(2 * max distance from the origin / per-step advance) + 1.
std::int64_t travel_allowance(const std::vector<sim::AgentDescriptor>& roster, const sim::WorldConfig& config);

}  // namespace swarmupdate::proto
