#include "swarmupdate/proto/common.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmupdate::proto {

void ProtocolParams::validate() const {
  if (max_concurrent < 1 || max_concurrent > sim::kMaxFormationSlots) {
    throw sim::ConfigError("max_concurrent must lie in [1, 18]");
  }
  if (group_size < 1 || group_size > sim::kMaxFormationSlots) throw sim::ConfigError("group_size must lie in [1, 18]");
  if (timeout_steps < 1) throw sim::ConfigError("timeout_steps must be positive");
  if (quiescence_steps < 1) throw sim::ConfigError("quiescence_steps must be positive");
  if (request_silence_steps < 1) throw sim::ConfigError("request_silence_steps must be positive");
  if (rerequest_steps < 1) throw sim::ConfigError("rerequest_steps must be positive");
  if (!(gather_fraction > 0.0 && gather_fraction < 1.0)) throw sim::ConfigError("gather_fraction must lie in (0, 1)");
}

bool PacketBitmap::set(std::size_t i) {
  if (i >= bits_.size()) throw std::out_of_range("packet index " + std::to_string(i) + " beyond patch");
  if (bits_[i]) return false;
  bits_[i] = true;
  ++count_;
  return true;
}

std::vector<std::int32_t> PacketBitmap::missing() const {
  std::vector<std::int32_t> out;
  out.reserve(bits_.size() - count_);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (!bits_[i]) out.push_back(static_cast<std::int32_t>(i));
  }
  return out;
}

bool FloodMemory::first_time(const Frame& f) {
  return seen_.emplace(f.signal, f.origin, f.subject, f.value).second;
}

void relay(AgentContext& ctx, const Frame& f) {
  Frame copy = f;
  copy.addressed_to.reset();
  ctx.emit(std::move(copy));
}

std::int64_t travel_allowance(const std::vector<sim::AgentDescriptor>& roster, const sim::WorldConfig& config) {
  double far = 0.0;
  for (const auto& a : roster) far = std::max(far, sim::norm(a.position));
  return static_cast<std::int64_t>(std::ceil(2.0 * far / config.step_advance_m())) + 1;
}

}  // namespace swarmupdate::proto
