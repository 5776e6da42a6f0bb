#include "swarmupdate/exp/scenario.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace swarmupdate::exp {

void ScenarioConfig::validate() const {
  if (swarm_size < 1) throw sim::ConfigError("swarm_size must be a positive integer");
  if (repetitions < 1) throw sim::ConfigError("repetitions must be at least 1");
  if (patch_packets < 0) throw sim::ConfigError("patch_packets must be non-negative");
  if (!(failure_rate >= 0.0 && failure_rate < 1.0)) throw sim::ConfigError("failure_rate must lie in [0, 1)");
  if (step_cap < 1) throw sim::ConfigError("step_cap must be positive");
  if (!(mix.eyebot_fraction >= 0.0 && mix.eyebot_fraction <= 1.0)) {
    throw sim::ConfigError("eyebot_fraction must lie in [0, 1]");
  }
  for (const auto& f : faults) {
    if (f.agent < 0 || f.agent > swarm_size) throw sim::ConfigError("fault names unknown agent " + std::to_string(f.agent));
  }
  params.validate();
  world_config_for(*this, 0).validate();
}

sim::WorldConfig world_config_for(const ScenarioConfig& config, int rep) {
  sim::WorldConfig w = config.world;
  w.failure_rate = config.failure_rate;
  w.seed = config.seed_base + static_cast<std::uint64_t>(rep);
  return w;
}

namespace {

MetricsRecord make_record(const sim::ChannelMetrics& m, std::int64_t steps, int swarm_size, bool converged) {
  MetricsRecord r;
  r.convergence_steps = steps;
  r.steps_per_drone = static_cast<double>(steps) / swarm_size;
  r.overhead_bytes = m.overhead_bytes;
  r.overhead_per_drone_bytes = static_cast<double>(m.overhead_bytes) / swarm_size;
  r.packet_emissions = m.packet_emissions;
  r.signal_emissions = m.signal_emissions;
  r.evictions = m.evictions;
  r.aborts = m.aborts;
  r.converged = converged;
  return r;
}

}  // namespace

RunResult run_scenario_detailed(const ScenarioConfig& config, int rep) {
  config.validate();
  RunResult result;
  const auto wc = world_config_for(config, rep);
  result.seed = wc.seed;

  sim::World world(wc, sim::place_swarm(config.swarm_size, config.mix, wc));
  world.enable_frame_log(config.record_frames);
  auto outcome = proto::install_protocol(config.strategy, world, config.params, config.patch_packets);
  for (const auto& f : config.faults) world.silence(f.agent, f.from_step);

  auto status = [&](sim::AgentId id) {
    return static_cast<const proto::ProtocolAgent*>(world.controller(id))->status();
  };
  auto all_live_aborted = [&] {
    for (std::size_t id = 1; id < world.agent_count(); ++id) {
      const auto a = static_cast<sim::AgentId>(id);
      if (!world.is_silenced(a) && !status(a).aborted) return false;
    }
    return true;
  };

  while (!outcome->converged && !outcome->updater_aborted) {
    if (world.current_step() >= config.step_cap) {
      throw NonConvergenceError("no convergence within " + std::to_string(config.step_cap) + " steps (" +
                                    proto::to_string(config.strategy) + ", size " +
                                    std::to_string(config.swarm_size) + ", seed " + std::to_string(wc.seed) + ")",
                                make_record(world.metrics(), world.current_step(), config.swarm_size, false));
    }
    world.step();
    if (outcome->aborted_agents > 0 && all_live_aborted()) break;
  }

  result.aborted = !outcome->converged;
  const std::int64_t steps = outcome->converged ? outcome->convergence_step : world.current_step();
  result.metrics = make_record(world.metrics(), steps, config.swarm_size, outcome->converged);
  result.channel = world.metrics();
  result.evicted = outcome->evicted;
  std::sort(result.evicted.begin(), result.evicted.end());
  result.evicted.erase(std::unique(result.evicted.begin(), result.evicted.end()), result.evicted.end());

  result.drones.resize(world.agent_count());
  for (std::size_t id = 0; id < world.agent_count(); ++id) result.drones[id] = status(static_cast<sim::AgentId>(id));
  for (auto e : result.evicted) result.drones.at(e).evicted = true;

  const auto packets = static_cast<std::uint32_t>(config.patch_packets);
  result.complete = true;
  for (std::size_t id = 1; id < world.agent_count(); ++id) {
    const auto& d = result.drones[id];
    if (d.applied && d.packets_held != packets) result.no_partial_apply = false;
    if (!d.needs_update || d.evicted || world.is_silenced(static_cast<sim::AgentId>(id))) continue;
    if (d.packets_held != packets || !d.applied) result.complete = false;
  }

  auto span = [&](const proto::DroneStatus& d) -> std::int64_t {
    return d.first_rx_step < 0 ? 0 : d.last_rx_step - d.first_rx_step + 1;
  };
  for (std::size_t id = 1; id < world.agent_count(); ++id) {
    const auto& d = result.drones[id];
    std::int64_t chain = span(d);
    if (d.upstream > 0) chain += span(result.drones.at(d.upstream));
    result.critical_transfer_steps = std::max(result.critical_transfer_steps, chain);
  }

  if (config.record_frames) result.frame_log = world.frame_log();
  return result;
}

MetricsRecord run_scenario(const ScenarioConfig& config, int rep) {
  auto cfg = config;
  cfg.record_frames = false;
  return run_scenario_detailed(cfg, rep).metrics;
}

}  // namespace swarmupdate::exp
