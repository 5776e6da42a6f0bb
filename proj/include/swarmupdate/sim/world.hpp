#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmupdate/sim/config.hpp"
#include "swarmupdate/sim/frame.hpp"
#include "swarmupdate/sim/geometry.hpp"
#include "swarmupdate/sim/placement.hpp"
#include "swarmupdate/sim/spatial_grid.hpp"

namespace swarmupdate::sim {

struct ChannelMetrics {
  std::uint64_t overhead_bytes = 0;
  std::uint64_t packet_emissions = 0;
  std::uint64_t signal_emissions = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_lost = 0;
  std::uint64_t evictions = 0;
  std::uint64_t aborts = 0;
  std::array<std::uint64_t, kSignalTypeCount> signals_by_type{};
};

struct FrameLogEntry {
  std::int64_t step = 0;
  AgentId sender = kNoAgent;
  FrameKind kind = FrameKind::Signal;
  SignalType signal = SignalType::None;
  std::int32_t packet_index = -1;
  std::uint32_t payload_bytes = 0;
};

/// Raised when a controller throws; carries the agent and step.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(AgentId agent, std::int64_t step, const std::string& what);
  AgentId agent() const { return agent_; }
  std::int64_t step() const { return step_; }

 private:
  AgentId agent_;
  std::int64_t step_;
};

using Inbox = std::span<const Frame* const>;

class World;

/// What a controller may see and do during its turn.
class AgentContext {
 public:
  AgentId id() const { return id_; }
  std::int64_t step() const;
  AgentType type() const;
  Vec2 position() const;
  const WorldConfig& config() const;
  /// Agents as placed at the start of the run (ids, types, home positions).
  const std::vector<AgentDescriptor>& roster() const;

  /// Queue a frame for broadcast; the sender field is filled in.
  void emit(Frame frame);
  /// Fly toward `target` at full speed during this step.
  void steer(Vec2 target);
  bool at(Vec2 target) const { return distance(position(), target) <= kArrivalEpsilon; }

  void count_eviction();
  void count_abort();

 private:
  friend class World;
  AgentContext(World& world, AgentId id) : world_(world), id_(id) {}
  World& world_;
  AgentId id_;
};

/// Per-agent protocol logic. Each step the world calls receive() with the
/// frames heard since the last step and then act(). Frames emitted from
/// either hook go on air at the end of the step (but see LatencyMode).
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void receive(AgentContext& ctx, Inbox inbox) = 0;
  virtual void act(AgentContext& ctx) = 0;
};

class World {
 public:
  World(WorldConfig config, std::vector<AgentDescriptor> agents);

  void set_controller(AgentId id, std::unique_ptr<Controller> controller);
  Controller* controller(AgentId id) const { return controllers_.at(id).get(); }

  /// Runs one control step.
  void step();

  /// Index of the next step to run; equals the number of steps completed.
  std::int64_t current_step() const { return step_; }
  const WorldConfig& config() const { return config_; }
  const std::vector<AgentDescriptor>& roster() const { return roster_; }
  std::size_t agent_count() const { return roster_.size(); }
  Vec2 position(AgentId id) const { return positions_.at(id); }
  const ChannelMetrics& metrics() const { return metrics_; }

  /// From `from_step` on the agent neither runs nor hears anything.
  void silence(AgentId id, std::int64_t from_step);
  bool is_silenced(AgentId id) const;

  void enable_frame_log(bool on) { log_enabled_ = on; }
  const std::vector<FrameLogEntry>& frame_log() const { return log_; }

  /// Puts a frame on air as if `frame.sender` emitted it during the last step.
  void inject(Frame frame);

 private:
  friend class AgentContext;

  void emit(AgentId sender, Frame frame);
  void deliver(const std::vector<Frame>& frames);
  void call(AgentId id, bool act_phase, Inbox inbox);
  bool running(AgentId id) const { return controllers_[id] && silenced_from_[id] > step_; }

  WorldConfig config_;
  std::vector<AgentDescriptor> roster_;
  std::vector<Vec2> positions_;
  std::vector<std::optional<Vec2>> targets_;
  std::vector<std::unique_ptr<Controller>> controllers_;
  std::vector<std::int64_t> silenced_from_;
  std::vector<int> packets_this_step_;

  std::vector<Frame> in_flight_;  // emitted last step, read this step
  std::vector<Frame> outgoing_;   // emitted this step, read next step
  std::vector<Frame> same_step_;  // Optimistic mode: replies read this step
  bool collecting_replies_ = false;

  std::vector<std::vector<const Frame*>> inboxes_;
  std::vector<AgentId> with_mail_;
  SpatialGrid grid_;
  std::int64_t grid_step_ = -1;

  std::mt19937_64 rng_;
  std::bernoulli_distribution delivered_;
  std::int64_t step_ = 0;
  ChannelMetrics metrics_;
  bool log_enabled_ = false;
  std::vector<FrameLogEntry> log_;
};

}  // namespace swarmupdate::sim
