#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace swarmupdate::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline double distance_sq(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Remaining distance at or below which an agent counts as arrived.
inline constexpr double kArrivalEpsilon = 0.05;

struct MoveResult {
  Vec2 position;
  bool arrived = false;
};

/// Advance from `from` toward `target` by at most `max_step` meters.
MoveResult move_towards(Vec2 from, Vec2 target, double max_step);

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxFormationSlots = 18;

/// Radius of the inner ring of six slots and the outer ring of twelve,
/// as fractions of the communication range.
inline constexpr double kInnerRingFraction = 5.0 / 12.0;
inline constexpr double kOuterRingFraction = 5.0 / 6.0;
inline constexpr double kMinSlotSeparation = 0.5;

/// First `k` slots of the two-ring hexagonal formation around `center`.
/// Throws CapacityError for k outside [1, 18] or a range so small that
/// neighbouring slots would sit closer than kMinSlotSeparation.
std::vector<Vec2> formation_slots(Vec2 center, int k, double comm_range);

/// Greedy nearest matching: repeatedly pairs the closest free (agent, slot)
/// pair. Returns the slot index for each agent position; needs
/// agents.size() <= slots.size().
std::vector<int> assign_slots(const std::vector<Vec2>& agents, const std::vector<Vec2>& slots);

}  // namespace swarmupdate::sim
