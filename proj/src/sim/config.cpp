#include "swarmupdate/sim/config.hpp"

#include <algorithm>
#include <cmath>

namespace swarmupdate::sim {

std::string to_string(LatencyMode mode) {
  return mode == LatencyMode::ArgosFaithful ? "argos" : "optimistic";
}

LatencyMode parse_latency_mode(const std::string& text) {
  if (text == "argos" || text == "argos_faithful" || text == "ArgosFaithful") return LatencyMode::ArgosFaithful;
  if (text == "optimistic" || text == "Optimistic") return LatencyMode::Optimistic;
  throw ConfigError("unknown latency mode '" + text + "' (expected argos or optimistic)");
}

void WorldConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(control_step_ms, "control_step_ms");
  positive(comm_range_m, "comm_range_m");
  positive(max_speed_mps, "max_speed_mps");
  if (!(failure_rate >= 0.0 && failure_rate < 1.0)) throw ConfigError("failure_rate must lie in [0, 1)");
  if (packet_size_bytes == 0) throw ConfigError("packet_size_bytes must be positive");
  if (arena_side_m < 0.0 || !std::isfinite(arena_side_m)) throw ConfigError("arena_side_m must be non-negative");
}

double default_arena_side(int n, double comm_range_m) {
  return std::max(6.0, 0.45 * std::sqrt(static_cast<double>(n)) * comm_range_m);
}

}  // namespace swarmupdate::sim
