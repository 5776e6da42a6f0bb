#include "swarmupdate/proto/gossip.hpp"

#include <set>
#include <stdexcept>

namespace swarmupdate::proto {

namespace {

struct Shared {
  ProtocolParams params;
  int packets = 0;
  std::set<AgentId> interested;
  std::shared_ptr<RunOutcome> outcome;
};

class GossipAgent final : public ProtocolAgent {
 public:
  GossipAgent(std::shared_ptr<const Shared> shared, AgentId id, bool updater)
      : shared_(std::move(shared)), id_(id), updater_(updater), interested_(shared_->interested.contains(id)) {
    if (updater_) {
      informed_ = true;
      bitmap_.resize(static_cast<std::size_t>(shared_->packets));
      for (int i = 0; i < shared_->packets; ++i) bitmap_.set(static_cast<std::size_t>(i));
      start_broadcasting(0);
    }
  }

  bool rebroadcasting() const { return broadcaster_; }

  DroneStatus status() const override {
    DroneStatus s;
    s.needs_update = interested_;
    s.packets_held = static_cast<std::uint32_t>(bitmap_.count());
    s.applied = interested_ && informed_ && bitmap_.full();
    s.first_rx_step = first_rx_;
    s.last_rx_step = last_rx_;
    return s;
  }

  void receive(AgentContext& ctx, Inbox inbox) override {
    const auto step = ctx.step();
    for (const Frame* f : inbox) {
      if (f->is_packet()) {
        on_packet(ctx, *f);
        continue;
      }
      switch (f->signal) {
        case SignalType::UpdateAvailable:
          if (memory_.first_time(*f)) {
            relay(ctx, *f);
            if (!informed_) {
              informed_ = true;
              bitmap_.resize(static_cast<std::size_t>(f->value));
              last_packet_step_ = step;
            }
          }
          break;
        case SignalType::Converged:
          if (memory_.first_time(*f)) {
            if (updater_) {
              on_converged(step, f->origin);
            } else {
              relay(ctx, *f);
            }
          }
          break;
        case SignalType::RetransmitRequest:
          if (broadcaster_) request_heard_ = true;
          break;
        default:
          break;
      }
    }
  }

  void act(AgentContext& ctx) override {
    const auto step = ctx.step();
    if (updater_ && step == 0) {
      Frame f = sim::make_signal(id_, SignalType::UpdateAvailable);
      f.value = shared_->packets;
      memory_.remember(f);
      ctx.emit(std::move(f));
      if (shared_->interested.empty() || shared_->packets == 0) {
        declare(step);
        broadcaster_ = false;
      }
    }
    if (broadcaster_ && step >= start_step_) {
      broadcast(ctx);
    } else if (interested_ && informed_ && !bitmap_.full()) {
      const bool silent = step - last_packet_step_ >= shared_->params.request_silence_steps;
      if ((silent || gap_seen_) && step - last_request_step_ >= shared_->params.request_silence_steps) {
        ctx.emit(sim::make_signal(id_, SignalType::RetransmitRequest));
        last_request_step_ = step;
        last_packet_step_ = step;
      }
      gap_seen_ = false;
    }
    request_heard_ = false;
  }

 private:
  void start_broadcasting(std::int64_t from_step) {
    broadcaster_ = true;
    start_step_ = from_step;
    cursor_ = 0;
    remaining_ = shared_->packets;
    quiet_ = 0;
  }

  void broadcast(AgentContext& ctx) {
    const int packets = shared_->packets;
    if (request_heard_) {
      if (dormant_) {
        dormant_ = false;
        cursor_ = 0;
      }
      // Keep cycling from the current position; every index follows within one cycle.
      remaining_ = packets;
      quiet_ = 0;
    }
    if (dormant_) return;
    // After the requested cycle the sender keeps cycling while it waits out
    // the quiet window.
    if (remaining_ > 0) {
      --remaining_;
    } else if (++quiet_ >= shared_->params.quiescence_steps) {
      dormant_ = true;
      if (!updater_) {
        Frame f = sim::make_signal(id_, SignalType::Converged);
        f.value = epoch_++;
        memory_.remember(f);
        ctx.emit(std::move(f));
      }
      return;
    }
    ctx.emit(sim::make_packet(id_, cursor_, ctx.config().packet_size_bytes));
    cursor_ = (cursor_ + 1) % packets;
  }

  void on_packet(AgentContext& ctx, const Frame& f) {
    if (!interested_ || !informed_ || bitmap_.full()) return;
    const auto step = ctx.step();
    last_packet_step_ = step;
    if (bitmap_.set(static_cast<std::size_t>(f.packet_index))) {
      if (first_rx_ < 0) first_rx_ = step;
      last_rx_ = step;
    }
    if (bitmap_.full()) {
      start_broadcasting(step + 1);
    } else if (f.packet_index == shared_->packets - 1) {
      gap_seen_ = true;
    }
  }

  void on_converged(std::int64_t step, AgentId origin) {
    if (shared_->outcome->converged || !shared_->interested.contains(origin)) return;
    reported_.insert(origin);
    if (reported_.size() == shared_->interested.size()) declare(step);
  }

  void declare(std::int64_t step) {
    shared_->outcome->converged = true;
    shared_->outcome->convergence_step = step;
  }

  std::shared_ptr<const Shared> shared_;
  AgentId id_;
  bool updater_;
  bool interested_;
  bool informed_ = false;
  PacketBitmap bitmap_;
  FloodMemory memory_;

  bool broadcaster_ = false;
  bool dormant_ = false;
  bool request_heard_ = false;
  bool gap_seen_ = false;
  std::int64_t start_step_ = 0;
  int cursor_ = 0;
  int remaining_ = 0;
  int quiet_ = 0;
  std::int64_t epoch_ = 0;

  std::int64_t last_packet_step_ = 0;
  std::int64_t last_request_step_ = -1'000'000;
  std::int64_t first_rx_ = -1;
  std::int64_t last_rx_ = -1;
  std::set<AgentId> reported_;
};

}  // namespace

std::shared_ptr<RunOutcome> install_gossip(sim::World& world, const ProtocolParams& params, int packets) {
  params.validate();
  if (packets < 0) throw sim::ConfigError("packet count must be non-negative");
  auto shared = std::make_shared<Shared>();
  shared->params = params;
  shared->packets = packets;
  shared->outcome = std::make_shared<RunOutcome>();
  for (const auto& a : world.roster()) {
    if (a.needs_update && a.uav_type != sim::AgentType::Updater) shared->interested.insert(a.id);
  }
  std::shared_ptr<const Shared> view = shared;
  for (const auto& a : world.roster()) {
    world.set_controller(a.id, std::make_unique<GossipAgent>(view, a.id, a.uav_type == sim::AgentType::Updater));
  }
  return shared->outcome;
}

bool gossip_rebroadcasting(const sim::Controller& controller) {
  const auto* g = dynamic_cast<const GossipAgent*>(&controller);
  if (g == nullptr) throw std::invalid_argument("controller is not a gossip agent");
  return g->rebroadcasting();
}

}  // namespace swarmupdate::proto
