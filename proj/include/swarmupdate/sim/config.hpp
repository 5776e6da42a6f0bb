#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace swarmupdate::sim {

/// When frames become readable.
enum class LatencyMode {
  /// Everything emitted during step t is read at t + 1.
  ArgosFaithful,
  /// Replies produced while reading the inbox reach their addressees within
  /// the same step, so a packet and its Ack share one step.
  Optimistic,
};

std::string to_string(LatencyMode mode);
LatencyMode parse_latency_mode(const std::string& text);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WorldConfig {
  double control_step_ms = 100.0;
  double comm_range_m = 3.0;
  double max_speed_mps = 1.0;
  double failure_rate = 0.0;
  std::uint32_t packet_size_bytes = 12500;
  LatencyMode latency_mode = LatencyMode::ArgosFaithful;
  /// 0 selects the default sizing rule (see default_arena_side).
  double arena_side_m = 0.0;
  std::uint64_t seed = 1;

  /// Distance covered in one control step at full speed.
  double step_advance_m() const { return max_speed_mps * control_step_ms / 1000.0; }

  /// Throws ConfigError on a value outside its domain.
  void validate() const;
};

/// max(6 m, 0.45 * sqrt(n) * comm_range)
double default_arena_side(int n, double comm_range_m);

}  // namespace swarmupdate::sim
