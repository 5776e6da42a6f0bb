#include "swarmupdate/sim/world.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace swarmupdate::sim {

SimulationError::SimulationError(AgentId agent, std::int64_t step, const std::string& what)
    : std::runtime_error("agent " + std::to_string(agent) + " failed at step " + std::to_string(step) + ": " + what),
      agent_(agent),
      step_(step) {}

std::int64_t AgentContext::step() const { return world_.step_; }
AgentType AgentContext::type() const { return world_.roster_[id_].uav_type; }
Vec2 AgentContext::position() const { return world_.positions_[id_]; }
const WorldConfig& AgentContext::config() const { return world_.config_; }
const std::vector<AgentDescriptor>& AgentContext::roster() const { return world_.roster_; }
void AgentContext::emit(Frame frame) { world_.emit(id_, std::move(frame)); }
void AgentContext::steer(Vec2 target) { world_.targets_[id_] = target; }
void AgentContext::count_eviction() { ++world_.metrics_.evictions; }
void AgentContext::count_abort() { ++world_.metrics_.aborts; }

World::World(WorldConfig config, std::vector<AgentDescriptor> agents)
    : config_(config),
      roster_(std::move(agents)),
      grid_(config.comm_range_m),
      rng_(config.seed ^ 0x9e3779b97f4a7c15ULL),
      delivered_(1.0 - config.failure_rate) {
  config_.validate();
  for (std::size_t i = 0; i < roster_.size(); ++i) {
    if (roster_[i].id != static_cast<AgentId>(i)) throw std::invalid_argument("agent ids must be 0..n in order");
  }
  const auto n = roster_.size();
  positions_.resize(n);
  for (std::size_t i = 0; i < n; ++i) positions_[i] = roster_[i].position;
  targets_.resize(n);
  controllers_.resize(n);
  silenced_from_.assign(n, std::numeric_limits<std::int64_t>::max());
  packets_this_step_.assign(n, 0);
  inboxes_.resize(n);
}

void World::set_controller(AgentId id, std::unique_ptr<Controller> controller) {
  controllers_.at(id) = std::move(controller);
}

void World::silence(AgentId id, std::int64_t from_step) { silenced_from_.at(id) = from_step; }

bool World::is_silenced(AgentId id) const { return silenced_from_.at(id) <= step_; }

void World::inject(Frame frame) {
  const AgentId sender = frame.sender;
  collecting_replies_ = false;
  --step_;
  try {
    emit(sender, std::move(frame));
  } catch (...) {
    ++step_;
    throw;
  }
  ++step_;
  in_flight_.insert(in_flight_.end(), std::make_move_iterator(outgoing_.begin()),
                    std::make_move_iterator(outgoing_.end()));
  outgoing_.clear();
}

void World::emit(AgentId sender, Frame frame) {
  frame.sender = sender;
  if (frame.kind == FrameKind::Packet) {
    if (frame.payload_bytes != config_.packet_size_bytes) {
      throw std::logic_error("packet frames must carry exactly packet_size_bytes");
    }
    if (++packets_this_step_[sender] > 1) throw std::logic_error("an agent may send one packet per step");
    ++metrics_.packet_emissions;
  } else {
    if (frame.payload_bytes < 1 || frame.payload_bytes > 10) {
      throw std::logic_error("signal frames carry 1 to 10 bytes");
    }
    ++metrics_.signal_emissions;
    ++metrics_.signals_by_type[static_cast<std::size_t>(frame.signal)];
  }
  metrics_.overhead_bytes += frame.payload_bytes;
  if (log_enabled_) {
    log_.push_back({step_, sender, frame.kind, frame.signal, frame.packet_index, frame.payload_bytes});
  }
  (collecting_replies_ ? same_step_ : outgoing_).push_back(std::move(frame));
}

void World::deliver(const std::vector<Frame>& frames) {
  if (frames.empty()) return;
  if (grid_step_ != step_) {
    grid_.rebuild(positions_);
    grid_step_ = step_;
  }
  const double r2 = config_.comm_range_m * config_.comm_range_m;
  const bool lossy = config_.failure_rate > 0.0;
  for (const auto& f : frames) {
    const Vec2 origin = positions_[f.sender];
    grid_.for_each_near(origin, [&](std::size_t j) {
      const auto to = static_cast<AgentId>(j);
      if (to == f.sender || !running(to) || distance_sq(origin, positions_[j]) > r2) return;
      if (f.kind == FrameKind::Packet) {
        if (lossy && !delivered_(rng_)) {
          ++metrics_.packets_lost;
          return;
        }
        ++metrics_.packets_delivered;
      }
      if (inboxes_[j].empty()) with_mail_.push_back(to);
      inboxes_[j].push_back(&f);
    });
  }
}

void World::call(AgentId id, bool act_phase, Inbox inbox) {
  AgentContext ctx(*this, id);
  try {
    if (act_phase) {
      controllers_[id]->act(ctx);
    } else {
      controllers_[id]->receive(ctx, inbox);
    }
  } catch (const SimulationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationError(id, step_, e.what());
  }
}

void World::step() {
  const auto n = static_cast<AgentId>(roster_.size());
  std::fill(packets_this_step_.begin(), packets_this_step_.end(), 0);

  deliver(in_flight_);
  collecting_replies_ = config_.latency_mode == LatencyMode::Optimistic;
  for (AgentId id = 0; id < n; ++id) {
    if (running(id)) call(id, false, inboxes_[id]);
  }
  for (auto id : with_mail_) inboxes_[id].clear();
  with_mail_.clear();
  in_flight_.clear();
  collecting_replies_ = false;

  if (!same_step_.empty()) {
    const std::vector<Frame> replies = std::move(same_step_);
    same_step_.clear();
    deliver(replies);
    std::vector<AgentId> order = std::move(with_mail_);
    with_mail_.clear();
    std::sort(order.begin(), order.end());
    for (auto id : order) {
      if (running(id)) call(id, false, inboxes_[id]);
    }
    for (auto id : order) inboxes_[id].clear();
  }

  for (AgentId id = 0; id < n; ++id) {
    if (running(id)) call(id, true, {});
  }

  const double advance = config_.step_advance_m();
  for (AgentId id = 0; id < n; ++id) {
    if (targets_[id]) {
      if (running(id)) positions_[id] = move_towards(positions_[id], *targets_[id], advance).position;
      targets_[id].reset();
    }
  }

  in_flight_.swap(outgoing_);
  outgoing_.clear();
  ++step_;
}

}  // namespace swarmupdate::sim
