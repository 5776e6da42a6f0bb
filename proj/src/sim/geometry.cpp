#include "swarmupdate/sim/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <string>
#include <tuple>

namespace swarmupdate::sim {

MoveResult move_towards(Vec2 from, Vec2 target, double max_step) {
  const double d = distance(from, target);
  if (d <= max_step) return {target, true};
  const Vec2 next = from + (target - from) * (max_step / d);
  return {next, d - max_step <= kArrivalEpsilon};
}

std::vector<Vec2> formation_slots(Vec2 center, int k, double comm_range) {
  if (k < 1 || k > kMaxFormationSlots) {
    throw CapacityError("formation holds 1 to " + std::to_string(kMaxFormationSlots) + " slots, asked for " +
                        std::to_string(k));
  }
  const double inner = kInnerRingFraction * comm_range;
  const double outer = kOuterRingFraction * comm_range;
  // Closest pairs are neighbours on the inner ring, at distance `inner`.
  if (inner < kMinSlotSeparation) {
    throw CapacityError("communication range " + std::to_string(comm_range) + " m is too short for 18 slots");
  }
  constexpr double kDeg = std::numbers::pi / 180.0;
  std::vector<Vec2> slots;
  slots.reserve(k);
  for (int i = 0; i < 6 && static_cast<int>(slots.size()) < k; ++i) {
    const double a = 60.0 * i * kDeg;
    slots.push_back(center + Vec2{inner * std::cos(a), inner * std::sin(a)});
  }
  for (int i = 0; i < 12 && static_cast<int>(slots.size()) < k; ++i) {
    const double a = (15.0 + 30.0 * i) * kDeg;
    slots.push_back(center + Vec2{outer * std::cos(a), outer * std::sin(a)});
  }
  return slots;
}

std::vector<int> assign_slots(const std::vector<Vec2>& agents, const std::vector<Vec2>& slots) {
  if (agents.size() > slots.size()) throw CapacityError("more agents than formation slots");
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(agents.size() * slots.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    for (std::size_t s = 0; s < slots.size(); ++s) pairs.emplace_back(distance_sq(agents[a], slots[s]), a, s);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<int> slot_of(agents.size(), -1);
  std::vector<bool> taken(slots.size(), false);
  std::size_t left = agents.size();
  for (const auto& [d, a, s] : pairs) {
    if (left == 0) break;
    if (slot_of[a] >= 0 || taken[s]) continue;
    slot_of[a] = static_cast<int>(s);
    taken[s] = true;
    --left;
  }
  return slot_of;
}

}  // namespace swarmupdate::sim
