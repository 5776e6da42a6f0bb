#include "swarmupdate/proto/soul.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace swarmupdate::proto {

std::vector<std::vector<AgentId>> soul_groups(const std::vector<sim::AgentDescriptor>& agents, int group_size) {
  if (group_size < 1) throw sim::ConfigError("group_size must be positive");
  std::vector<AgentId> compatible;
  for (const auto& a : agents) {
    if (a.needs_update && a.uav_type != sim::AgentType::Updater) compatible.push_back(a.id);
  }
  std::sort(compatible.begin(), compatible.end());
  std::vector<std::vector<AgentId>> groups;
  if (compatible.empty()) return groups;
  const std::size_t k = (compatible.size() + group_size - 1) / group_size;
  const std::size_t base = compatible.size() / k;
  const std::size_t extra = compatible.size() % k;
  std::size_t next = 0;
  for (std::size_t g = 0; g < k; ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    groups.emplace_back(compatible.begin() + next, compatible.begin() + next + size);
    next += size;
  }
  return groups;
}

namespace {

using sim::Vec2;

struct Shared {
  ProtocolParams params;
  int packets = 0;
  std::vector<std::vector<AgentId>> groups;
  std::vector<int> group_of;
  std::map<AgentId, Vec2> slot;
  std::vector<Vec2> home;
  std::int64_t travel = 0;
  std::shared_ptr<RunOutcome> outcome;
};

class SoulUpdater final : public ProtocolAgent {
 public:
  explicit SoulUpdater(std::shared_ptr<const Shared> shared) : shared_(std::move(shared)) {}

  DroneStatus status() const override { return {}; }

  void receive(AgentContext& /*ctx*/, Inbox inbox) override {
    for (const Frame* f : inbox) {
      if (f->kind != sim::FrameKind::Signal || !f->for_me(0)) continue;
      if (f->signal == SignalType::AtLocation) {
        arrived_.insert(f->sender);
      } else if (f->signal == SignalType::RetransmitRequest && phase_ == Phase::Serve) {
        request_heard_ = true;
        if (f->indices) pending_.insert(f->indices->begin(), f->indices->end());
      }
    }
  }

  void act(AgentContext& ctx) override {
    const auto step = ctx.step();
    if (phase_ == Phase::Announce) {
      Frame f = sim::make_signal(0, SignalType::UpdateAvailable);
      f.value = shared_->packets;
      ctx.emit(std::move(f));
      if (shared_->groups.empty() || shared_->packets == 0) {
        declare(step);
        return;
      }
      summon(ctx, 0);
    }
    if (phase_ == Phase::AwaitArrival) {
      const auto& members = shared_->groups[group_];
      const bool all_there =
          std::all_of(members.begin(), members.end(), [&](AgentId a) { return arrived_.contains(a); });
      if (!all_there && step < arrival_deadline_) return;
      phase_ = Phase::Serve;
      round_ = 0;
      queue_.clear();
      for (int i = 0; i < shared_->packets; ++i) queue_.push_back(i);
    }
    if (phase_ == Phase::Serve) serve(ctx, step);
    request_heard_ = false;
  }

 private:
  enum class Phase { Announce, AwaitArrival, Serve, Done };

  void summon(AgentContext& ctx, int group) {
    group_ = group;
    Frame f = sim::make_signal(0, SignalType::GroupTurn);
    f.value = group;
    ctx.emit(std::move(f));
    phase_ = Phase::AwaitArrival;
    arrival_deadline_ = ctx.step() + shared_->params.timeout_steps + shared_->travel;
    quiet_ = 0;
    pending_.clear();
  }

  void serve(AgentContext& ctx, std::int64_t step) {
    if (queue_.empty() && !pending_.empty()) {
      ++round_;
      queue_.assign(pending_.begin(), pending_.end());
      pending_.clear();
    }
    if (!queue_.empty()) {
      Frame p = sim::make_packet(0, queue_.front(), ctx.config().packet_size_bytes);
      queue_.pop_front();
      p.round = round_;
      p.remaining = static_cast<std::int32_t>(queue_.size());
      ctx.emit(std::move(p));
      quiet_ = 0;
      return;
    }
    if (request_heard_) {
      quiet_ = 0;
      return;
    }
    if (++quiet_ < shared_->params.quiescence_steps) return;
    if (group_ + 1 < static_cast<int>(shared_->groups.size())) {
      summon(ctx, group_ + 1);
      return;
    }
    Frame f = sim::make_signal(0, SignalType::Converged);
    ctx.emit(std::move(f));
    declare(step);
  }

  void declare(std::int64_t step) {
    phase_ = Phase::Done;
    shared_->outcome->converged = true;
    shared_->outcome->convergence_step = step;
  }

  std::shared_ptr<const Shared> shared_;
  Phase phase_ = Phase::Announce;
  int group_ = 0;
  std::int32_t round_ = 0;
  std::deque<std::int32_t> queue_;
  std::set<std::int32_t> pending_;
  std::set<AgentId> arrived_;
  bool request_heard_ = false;
  int quiet_ = 0;
  std::int64_t arrival_deadline_ = 0;
};

class SoulDrone final : public ProtocolAgent {
 public:
  SoulDrone(std::shared_ptr<const Shared> shared, AgentId id)
      : shared_(std::move(shared)), id_(id), group_(shared_->group_of[id]) {}

  DroneStatus status() const override {
    DroneStatus s;
    s.needs_update = group_ >= 0;
    s.packets_held = static_cast<std::uint32_t>(bitmap_.count());
    s.applied = applied_;
    s.first_rx_step = first_rx_;
    s.last_rx_step = last_rx_;
    s.upstream = first_rx_ >= 0 ? 0 : sim::kNoAgent;
    return s;
  }

  void receive(AgentContext& ctx, Inbox inbox) override {
    const auto step = ctx.step();
    for (const Frame* f : inbox) {
      if (f->is_packet()) {
        if (phase_ == Phase::AtLocation && f->sender == 0) on_packet(step, *f);
        continue;
      }
      switch (f->signal) {
        case SignalType::UpdateAvailable:
        case SignalType::GroupTurn:
        case SignalType::Converged:
          if (!memory_.first_time(*f)) break;
          relay(ctx, *f);
          if (f->signal == SignalType::UpdateAvailable && group_ >= 0 && phase_ == Phase::Idle) {
            bitmap_.resize(static_cast<std::size_t>(f->value));
            phase_ = Phase::Waiting;
          } else if (f->signal == SignalType::GroupTurn && f->value == group_ && phase_ == Phase::Waiting) {
            phase_ = Phase::Travel;
          }
          break;
        default:
          break;
      }
    }
  }

  void act(AgentContext& ctx) override {
    const auto step = ctx.step();
    switch (phase_) {
      case Phase::Travel: {
        const Vec2 slot = shared_->slot.at(id_);
        if (ctx.at(slot)) {
          Frame f = sim::make_signal(id_, SignalType::AtLocation);
          f.addressed_to = 0;
          ctx.emit(std::move(f));
          phase_ = Phase::AtLocation;
          // Backstop in case the whole blast is lost.
          request_at_ = step + shared_->params.timeout_steps + shared_->travel + shared_->packets;
        } else {
          ctx.steer(slot);
        }
        break;
      }
      case Phase::AtLocation:
        if (bitmap_.full()) {
          Frame f = sim::make_signal(id_, SignalType::Complete);
          f.addressed_to = 0;
          ctx.emit(std::move(f));
          applied_ = true;
          phase_ = Phase::Done;
          ctx.steer(shared_->home[id_]);
        } else if (step >= request_at_) {
          Frame f = sim::make_signal(id_, SignalType::RetransmitRequest);
          f.addressed_to = 0;
          f.indices = std::make_shared<const std::vector<std::int32_t>>(bitmap_.missing());
          ctx.emit(std::move(f));
          request_at_ = step + shared_->params.rerequest_steps;
        }
        break;
      case Phase::Done:
        if (!ctx.at(shared_->home[id_])) ctx.steer(shared_->home[id_]);
        break;
      default:
        break;
    }
  }

 private:
  enum class Phase { Idle, Waiting, Travel, AtLocation, Done };

  void on_packet(std::int64_t step, const Frame& f) {
    if (bitmap_.set(static_cast<std::size_t>(f.packet_index))) {
      if (first_rx_ < 0) first_rx_ = step;
      last_rx_ = step;
    }
    // The round's last packet is due `remaining` steps from now.
    request_at_ = step + f.remaining;
  }

  std::shared_ptr<const Shared> shared_;
  AgentId id_;
  int group_;
  Phase phase_ = Phase::Idle;
  PacketBitmap bitmap_;
  FloodMemory memory_;
  bool applied_ = false;
  std::int64_t request_at_ = 0;
  std::int64_t first_rx_ = -1;
  std::int64_t last_rx_ = -1;
};

}  // namespace

std::shared_ptr<RunOutcome> install_soul(sim::World& world, const ProtocolParams& params, int packets) {
  params.validate();
  if (packets < 0) throw sim::ConfigError("packet count must be non-negative");
  const auto& roster = world.roster();
  auto shared = std::make_shared<Shared>();
  shared->params = params;
  shared->packets = packets;
  shared->groups = soul_groups(roster, params.group_size);
  shared->group_of.assign(roster.size(), -1);
  shared->travel = travel_allowance(roster, world.config());
  shared->outcome = std::make_shared<RunOutcome>();
  for (const auto& a : roster) shared->home.push_back(a.position);
  for (std::size_t g = 0; g < shared->groups.size(); ++g) {
    const auto& members = shared->groups[g];
    std::vector<Vec2> starts;
    for (auto id : members) {
      shared->group_of[id] = static_cast<int>(g);
      starts.push_back(roster[id].position);
    }
    const auto slots =
        sim::formation_slots(roster[0].position, static_cast<int>(members.size()), world.config().comm_range_m);
    const auto pick = sim::assign_slots(starts, slots);
    for (std::size_t i = 0; i < members.size(); ++i) shared->slot[members[i]] = slots[pick[i]];
  }
  std::shared_ptr<const Shared> view = shared;
  for (const auto& a : roster) {
    if (a.uav_type == sim::AgentType::Updater) {
      world.set_controller(a.id, std::make_unique<SoulUpdater>(view));
    } else {
      world.set_controller(a.id, std::make_unique<SoulDrone>(view, a.id));
    }
  }
  return shared->outcome;
}

}  // namespace swarmupdate::proto
