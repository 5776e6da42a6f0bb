#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmupdate/proto/common.hpp"
#include "swarmupdate/proto/protocol.hpp"
#include "swarmupdate/sim/config.hpp"
#include "swarmupdate/sim/placement.hpp"
#include "swarmupdate/sim/world.hpp"

namespace swarmupdate::exp {

/// Silences one agent from a given step on.
struct Fault {
  sim::AgentId agent = 0;
  std::int64_t from_step = 0;
};

struct ScenarioConfig {
  proto::Strategy strategy = proto::Strategy::SwarmSync;
  int swarm_size = 20;
  double failure_rate = 0.0;
  int patch_packets = 240;
  int repetitions = 10;
  std::uint64_t seed_base = 1;
  /// failure_rate and seed in here are overwritten per run.
  sim::WorldConfig world;
  sim::TypeMix mix;
  proto::ProtocolParams params;
  std::int64_t step_cap = 200000;
  std::vector<Fault> faults;
  bool record_frames = false;

  /// Throws sim::ConfigError on an invalid combination.
  void validate() const;
};

struct MetricsRecord {
  std::int64_t convergence_steps = 0;
  double steps_per_drone = 0.0;
  std::uint64_t overhead_bytes = 0;
  double overhead_per_drone_bytes = 0.0;
  std::uint64_t packet_emissions = 0;
  std::uint64_t signal_emissions = 0;
  std::uint64_t evictions = 0;
  std::uint64_t aborts = 0;
  bool converged = false;
};

/// Everything a test may want to inspect after a run.
struct RunResult {
  MetricsRecord metrics;
  std::uint64_t seed = 0;
  bool aborted = false;
  /// Every compatible drone that was neither evicted nor silenced holds
  /// the whole patch and has applied it.
  bool complete = false;
  /// No drone applied anything without holding every packet.
  bool no_partial_apply = true;
  /// Longest chain of packet reception windows on any path from the
  /// Updater, in steps (travel between windows excluded).
  std::int64_t critical_transfer_steps = 0;
  std::vector<proto::DroneStatus> drones;
  std::vector<sim::AgentId> evicted;
  std::vector<sim::FrameLogEntry> frame_log;
  sim::ChannelMetrics channel;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, MetricsRecord partial)
      : std::runtime_error(what), partial_(partial) {}
  const MetricsRecord& partial() const { return partial_; }

 private:
  MetricsRecord partial_;
};

/// World configuration for one repetition: seed = seed_base + rep.
sim::WorldConfig world_config_for(const ScenarioConfig& config, int rep);

/// Runs one repetition to convergence, abort, or the step cap. Throws
/// NonConvergenceError when the cap is hit.
RunResult run_scenario_detailed(const ScenarioConfig& config, int rep);

MetricsRecord run_scenario(const ScenarioConfig& config, int rep);

}  // namespace swarmupdate::exp
