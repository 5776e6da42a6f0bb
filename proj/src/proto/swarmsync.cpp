#include "swarmupdate/proto/swarmsync.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

namespace swarmupdate::proto {

using sim::AgentType;
using sim::Vec2;

SubSwarmPlan partition_subswarms(const std::vector<sim::AgentDescriptor>& agents, int max_concurrent,
                                 LeaderRule /*rule*/) {
  if (max_concurrent < 1) throw sim::CapacityError("max_concurrent must be positive");
  const auto n_cap = static_cast<std::size_t>(max_concurrent);

  std::map<AgentType, std::vector<const sim::AgentDescriptor*>> by_type;
  std::size_t compatible = 0;
  for (const auto& a : agents) {
    if (a.needs_update && a.uav_type != AgentType::Updater) {
      by_type[a.uav_type].push_back(&a);
      ++compatible;
    }
  }
  SubSwarmPlan plan;
  if (compatible == 0) return plan;
  if (compatible <= n_cap) {
    for (const auto& [type, members] : by_type) {
      for (const auto* a : members) plan.direct.push_back(a->id);
    }
    std::sort(plan.direct.begin(), plan.direct.end());
    return plan;
  }
  if (compatible > n_cap * n_cap) {
    throw sim::CapacityError(std::to_string(compatible) + " compatible agents exceed the two-level limit of " +
                             std::to_string(n_cap * n_cap));
  }

  for (auto& [type, members] : by_type) {
    std::sort(members.begin(), members.end(), [](auto* a, auto* b) { return a->id < b->id; });
    const std::size_t k = (members.size() + n_cap) / (n_cap + 1);
    const std::size_t first = plan.subswarms.size();
    for (std::size_t i = 0; i < k; ++i) plan.subswarms.push_back({type, members[i]->id, {}});

    // Nearest leader first, with follower counts kept within one of each other.
    const std::size_t followers = members.size() - k;
    const std::size_t base = followers / k;
    std::size_t extra = followers % k;
    std::vector<std::tuple<double, AgentId, std::size_t>> pairs;
    for (std::size_t f = k; f < members.size(); ++f) {
      for (std::size_t l = 0; l < k; ++l) {
        pairs.emplace_back(sim::distance_sq(members[f]->position, members[l]->position), members[f]->id, l);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::set<AgentId> placed;
    for (const auto& [d, id, l] : pairs) {
      if (placed.contains(id)) continue;
      auto& sub = plan.subswarms[first + l];
      if (sub.followers.size() >= base) {
        if (sub.followers.size() > base || extra == 0) continue;
        --extra;
      }
      sub.followers.push_back(id);
      placed.insert(id);
    }
    for (std::size_t l = first; l < plan.subswarms.size(); ++l) {
      std::sort(plan.subswarms[l].followers.begin(), plan.subswarms[l].followers.end());
    }
  }
  if (plan.subswarms.size() > n_cap) {
    throw sim::CapacityError(std::to_string(plan.subswarms.size()) + " leaders exceed N = " + std::to_string(n_cap));
  }
  return plan;
}

namespace {

/// Read-only knowledge every agent derives from the shared election rule.
struct Shared {
  ProtocolParams params;
  int packets = 0;
  SubSwarmPlan plan;
  std::vector<int> subswarm_of;  // -1 when not in a sub-swarm
  std::vector<bool> is_direct;
  /// Formation slot for each sub-swarm (by index) and each direct recipient (by id).
  std::vector<Vec2> subswarm_slot;
  std::map<AgentId, Vec2> direct_slot;
  std::vector<Vec2> home;  // roster positions
  std::int64_t travel = 0;
  std::shared_ptr<RunOutcome> outcome;

  /// Lowest member of the sub-swarm that has not been replaced and is not `old`.
  AgentId successor(int s, const std::set<AgentId>& replaced, AgentId old) const {
    const auto& sub = plan.subswarms[s];
    if (sub.leader != old && !replaced.contains(sub.leader)) return sub.leader;
    for (auto f : sub.followers) {
      if (f != old && !replaced.contains(f)) return f;
    }
    return sim::kNoAgent;
  }
};

Frame flood(AgentContext& ctx, SignalType type, FloodMemory& memory) {
  Frame f = sim::make_signal(ctx.id(), type);
  memory.remember(f);
  return f;
}

class SwarmSyncUpdater;
class SwarmSyncDrone;

class SwarmSyncController : public ProtocolAgent {
 public:
  virtual SwarmSyncRole role() const = 0;
};

class SwarmSyncUpdater final : public SwarmSyncController {
 public:
  explicit SwarmSyncUpdater(std::shared_ptr<const Shared> shared) : shared_(std::move(shared)) {
    const auto& plan = shared_->plan;
    if (!plan.direct.empty()) {
      for (auto id : plan.direct) expected_.insert(id);
      session_ = plan.direct;
    } else {
      for (const auto& sub : plan.subswarms) {
        expected_.insert(sub.leader);
        session_.push_back(sub.leader);
      }
    }
  }

  SwarmSyncRole role() const override { return SwarmSyncRole::Updater; }
  DroneStatus status() const override { return {}; }

  void receive(AgentContext& ctx, Inbox inbox) override {
    for (const Frame* f : inbox) {
      if (phase_ == Phase::Done) return;
      if (f->kind != sim::FrameKind::Signal) continue;
      switch (f->signal) {
        case SignalType::InPosition:
          if (f->for_me(ctx.id())) in_position_.insert(f->sender);
          break;
        case SignalType::Ack:
          if (f->for_me(ctx.id()) && phase_ == Phase::Transfer && f->packet_index == current_) acked_.insert(f->sender);
          break;
        case SignalType::Complete:
          if (f->for_me(ctx.id())) reported_.insert(f->sender);
          break;
        case SignalType::Converged:
          if (memory_.first_time(*f)) reported_.insert(f->origin);
          break;
        case SignalType::ReappointLeader:
          if (memory_.first_time(*f)) {
            relay(ctx, *f);
            on_reappoint(f->subject, static_cast<AgentId>(f->value));
          }
          break;
        case SignalType::Abort:
          if (memory_.first_time(*f)) {
            relay(ctx, *f);
            shared_->outcome->updater_aborted = true;
            phase_ = Phase::Done;
          }
          break;
        default:
          break;
      }
    }
  }

  void act(AgentContext& ctx) override {
    const auto step = ctx.step();
    if (phase_ == Phase::Announce) {
      Frame f = flood(ctx, SignalType::UpdateAvailable, memory_);
      f.value = shared_->packets;
      ctx.emit(std::move(f));
      if (shared_->plan.empty() || shared_->packets == 0) {
        declare(step);
        return;
      }
      begin_session(step);
    }
    if (phase_ == Phase::AwaitInPosition) {
      const bool all_there =
          std::all_of(session_.begin(), session_.end(), [&](AgentId a) { return in_position_.contains(a); });
      if (all_there) {
        phase_ = Phase::Transfer;
        current_ = 0;
        acked_.clear();
        deadline_ = -1;
      } else if (step >= deadline_) {
        std::vector<AgentId> missing;
        for (auto a : session_) {
          if (!in_position_.contains(a)) missing.push_back(a);
        }
        unresponsive(ctx, missing);
        return;
      } else {
        return;
      }
    }
    if (phase_ == Phase::Transfer) {
      transfer(ctx);
      if (phase_ != Phase::AwaitConverged) return;
    }
    if (phase_ == Phase::AwaitConverged) {
      if (!queue_.empty()) {
        session_ = queue_;
        queue_.clear();
        begin_session(step);
        return;
      }
      if (std::all_of(expected_.begin(), expected_.end(), [&](AgentId a) { return reported_.contains(a); })) {
        declare(step);
      }
    }
  }

 private:
  enum class Phase { Announce, AwaitInPosition, Transfer, AwaitConverged, Done };

  void declare(std::int64_t step) {
    phase_ = Phase::Done;
    shared_->outcome->converged = true;
    shared_->outcome->convergence_step = step;
  }

  void begin_session(std::int64_t step) {
    phase_ = session_.empty() ? Phase::AwaitConverged : Phase::AwaitInPosition;
    deadline_ = step + shared_->params.timeout_steps + shared_->travel;
  }

  void transfer(AgentContext& ctx) {
    const auto step = ctx.step();
    const int packets = shared_->packets;
    for (;;) {
      const bool all_acked =
          std::all_of(session_.begin(), session_.end(), [&](AgentId a) { return acked_.contains(a); });
      if (all_acked) {
        ++current_;
        acked_.clear();
        deadline_ = -1;
        if (current_ >= packets) {
          session_.clear();
          phase_ = Phase::AwaitConverged;
          return;
        }
        continue;
      }
      if (deadline_ >= 0 && step >= deadline_) {
        std::vector<AgentId> missing;
        for (auto a : session_) {
          if (!acked_.contains(a)) missing.push_back(a);
        }
        unresponsive(ctx, missing);
        if (phase_ != Phase::Transfer) return;
        continue;
      }
      break;
    }
    ctx.emit(sim::make_packet(ctx.id(), current_, ctx.config().packet_size_bytes));
    if (deadline_ < 0) deadline_ = step + shared_->params.timeout_steps;
  }

  /// Handles members that missed a deadline: leaders are replaced and the
  /// transfer restarts from packet 0, direct recipients are evicted.
  void unresponsive(AgentContext& ctx, const std::vector<AgentId>& missing) {
    bool restart = false;
    for (auto m : missing) {
      session_.erase(std::remove(session_.begin(), session_.end(), m), session_.end());
      expected_.erase(m);
      const int s = shared_->subswarm_of[m];
      if (s < 0) {
        ctx.count_eviction();
        shared_->outcome->evicted.push_back(m);
        continue;
      }
      const AgentId next = shared_->successor(s, replaced_, m);
      replaced_.insert(m);
      Frame f = sim::make_signal(ctx.id(), SignalType::ReappointLeader);
      f.subject = m;
      f.value = next;
      memory_.remember(f);
      ctx.emit(std::move(f));
      if (next == sim::kNoAgent) continue;
      expected_.insert(next);
      session_.push_back(next);
      restart = true;
    }
    if (restart) {
      // Members that already hold the last packet have left the formation.
      if (phase_ == Phase::Transfer && current_ == shared_->packets - 1) {
        std::erase_if(session_, [&](AgentId a) { return acked_.contains(a); });
      }
      current_ = 0;
      acked_.clear();
      begin_session(ctx.step());
      return;
    }
    if (session_.empty()) {
      phase_ = Phase::AwaitConverged;
    } else if (phase_ == Phase::AwaitInPosition) {
      // Survivors are already waiting; keep the deadline running.
    } else {
      deadline_ = -1;
    }
  }

  void on_reappoint(AgentId old, AgentId next) {
    replaced_.insert(old);
    expected_.erase(old);
    session_.erase(std::remove(session_.begin(), session_.end(), old), session_.end());
    if (next == sim::kNoAgent) return;
    expected_.insert(next);
    reported_.erase(next);
    if (std::find(session_.begin(), session_.end(), next) == session_.end() &&
        std::find(queue_.begin(), queue_.end(), next) == queue_.end()) {
      queue_.push_back(next);
    }
  }

  std::shared_ptr<const Shared> shared_;
  Phase phase_ = Phase::Announce;
  FloodMemory memory_;
  std::vector<AgentId> session_;
  std::vector<AgentId> queue_;
  std::set<AgentId> in_position_;
  std::set<AgentId> acked_;
  std::set<AgentId> expected_;
  std::set<AgentId> reported_;
  std::set<AgentId> replaced_;
  std::int32_t current_ = 0;
  std::int64_t deadline_ = -1;
};

class SwarmSyncDrone final : public SwarmSyncController {
 public:
  SwarmSyncDrone(std::shared_ptr<const Shared> shared, AgentId id)
      : shared_(std::move(shared)), id_(id), bitmap_(static_cast<std::size_t>(shared_->packets)) {
    const int s = shared_->subswarm_of[id];
    if (shared_->is_direct[id]) {
      role_ = SwarmSyncRole::Direct;
    } else if (s >= 0) {
      subswarm_ = s;
      const auto& sub = shared_->plan.subswarms[s];
      if (sub.leader == id) {
        role_ = SwarmSyncRole::Leader;
        followers_ = sub.followers;
      } else {
        role_ = SwarmSyncRole::Follower;
        leader_ = sub.leader;
      }
    }
  }

  SwarmSyncRole role() const override { return role_; }

  DroneStatus status() const override {
    DroneStatus s;
    s.needs_update = shared_->subswarm_of[id_] >= 0 || shared_->is_direct[id_];
    s.packets_held = static_cast<std::uint32_t>(bitmap_.count());
    s.applied = applied_;
    s.aborted = aborted_;
    s.first_rx_step = first_rx_;
    s.last_rx_step = last_rx_;
    s.upstream = upstream_;
    return s;
  }

  void receive(AgentContext& ctx, Inbox inbox) override {
    for (const Frame* f : inbox) {
      if (f->kind == sim::FrameKind::Packet) {
        if (!aborted_) on_packet(ctx, *f);
        continue;
      }
      switch (f->signal) {
        case SignalType::UpdateAvailable:
        case SignalType::Converged:
        case SignalType::ReappointLeader:
        case SignalType::Abort:
          if (memory_.first_time(*f)) {
            relay(ctx, *f);
            if (!aborted_) on_flood(ctx, *f);
          }
          break;
        case SignalType::Ack:
          if (!aborted_ && f->for_me(id_) && role_ == SwarmSyncRole::Leader && phase_ == Phase::Distributing &&
              f->packet_index == current_) {
            acked_.insert(f->sender);
          }
          break;
        case SignalType::Complete:
          if (!aborted_ && f->for_me(id_) && role_ == SwarmSyncRole::Leader) completed_.insert(f->sender);
          break;
        default:
          break;
      }
    }
  }

  void act(AgentContext& ctx) override {
    if (aborted_ || !informed_) return;
    const auto step = ctx.step();
    switch (role_) {
      case SwarmSyncRole::Leader:
      case SwarmSyncRole::Direct:
        act_upstream(ctx, step);
        break;
      case SwarmSyncRole::Follower:
        act_follower(ctx, step);
        break;
      default:
        break;
    }
  }

 private:
  enum class Phase { Idle, ToSlot, Receiving, Returning, Distributing, AwaitComplete, Gathering, Done };

  Vec2 slot() const {
    return role_ == SwarmSyncRole::Direct ? shared_->direct_slot.at(id_) : shared_->subswarm_slot[subswarm_];
  }
  /// Where a sub-swarm gathers: the home of its originally elected leader.
  Vec2 rally_point() const { return shared_->home[shared_->plan.subswarms[subswarm_].leader]; }
  std::int64_t timeout() const { return shared_->params.timeout_steps; }

  void on_flood(AgentContext& ctx, const Frame& f) {
    const auto step = ctx.step();
    switch (f.signal) {
      case SignalType::UpdateAvailable:
        if (informed_) break;
        informed_ = true;
        if (role_ == SwarmSyncRole::Leader || role_ == SwarmSyncRole::Direct) {
          phase_ = Phase::ToSlot;
        } else if (role_ == SwarmSyncRole::Follower) {
          phase_ = Phase::Gathering;
        }
        break;
      case SignalType::Converged:
        if (role_ == SwarmSyncRole::Follower && f.origin == leader_) silence_deadline_ = -1;
        break;
      case SignalType::ReappointLeader:
        on_reappoint(ctx, f.subject, static_cast<AgentId>(f.value));
        break;
      case SignalType::Abort:
        abort(ctx);
        break;
      default:
        break;
    }
    (void)step;
  }

  void on_reappoint(AgentContext& ctx, AgentId old, AgentId next) {
    replaced_.insert(old);
    if (subswarm_ < 0) return;
    if (shared_->subswarm_of[old] != subswarm_) {
      // Someone else's sub-swarm; the Updater pauses while a new leader travels.
      if (phase_ == Phase::Receiving) rx_deadline_ = ctx.step() + timeout() + shared_->travel;
      return;
    }
    if (role_ == SwarmSyncRole::Leader && (old == id_ || next != id_)) {
      if (old != id_) {
        if (phase_ == Phase::Receiving) rx_deadline_ = ctx.step() + timeout() + shared_->travel;
        return;
      }
      // Replaced: serve as a follower of the successor from now on.
      become_follower(ctx, next);
      return;
    }
    if (role_ == SwarmSyncRole::Follower && old == leader_) {
      if (next == id_) {
        become_leader(ctx);
      } else {
        leader_ = next;
        silence_deadline_ = -1;
        if (!bitmap_.full() && informed_) phase_ = Phase::Gathering;
      }
    }
  }

  void become_follower(AgentContext& /*ctx*/, AgentId leader) {
    role_ = SwarmSyncRole::Follower;
    leader_ = leader;
    followers_.clear();
    silence_deadline_ = -1;
    phase_ = bitmap_.full() ? Phase::Done : Phase::Gathering;
  }

  void become_leader(AgentContext& ctx) {
    role_ = SwarmSyncRole::Leader;
    leader_ = sim::kNoAgent;
    silence_deadline_ = -1;
    const auto& sub = shared_->plan.subswarms[subswarm_];
    followers_.clear();
    if (!replaced_.contains(sub.leader) && sub.leader != id_) followers_.push_back(sub.leader);
    for (auto f : sub.followers) {
      if (f != id_ && !replaced_.contains(f)) followers_.push_back(f);
    }
    acked_.clear();
    completed_.clear();
    evicted_.clear();
    phase_ = Phase::ToSlot;
    (void)ctx;
  }

  void abort(AgentContext& ctx) {
    if (aborted_) return;
    aborted_ = true;
    phase_ = Phase::Done;
    ++shared_->outcome->aborted_agents;
    (void)ctx;
  }

  void record_rx(std::int64_t step) {
    if (first_rx_ < 0) first_rx_ = step;
    last_rx_ = step;
  }

  void on_packet(AgentContext& ctx, const Frame& f) {
    const auto step = ctx.step();
    const auto index = static_cast<std::size_t>(f.packet_index);
    if (role_ == SwarmSyncRole::Leader || role_ == SwarmSyncRole::Direct) {
      if (f.sender != 0 || phase_ != Phase::Receiving) return;
      rx_deadline_ = step + timeout();
      if (bitmap_.set(index)) record_rx(step);
      upstream_ = 0;
      Frame ack = sim::make_signal(id_, SignalType::Ack);
      ack.packet_index = f.packet_index;
      ack.addressed_to = 0;
      ctx.emit(std::move(ack));
      if (!bitmap_.full()) return;
      applied_ = true;
      if (role_ == SwarmSyncRole::Direct) {
        Frame done = sim::make_signal(id_, SignalType::Complete);
        done.addressed_to = 0;
        ctx.emit(std::move(done));
        phase_ = Phase::Done;
      } else if (followers_.empty()) {
        ctx.emit(flood(ctx, SignalType::Converged, memory_));
        phase_ = Phase::Done;
      } else {
        phase_ = Phase::Returning;
      }
      return;
    }
    if (role_ == SwarmSyncRole::Follower && f.sender == leader_) {
      if (bitmap_.set(index)) record_rx(step);
      upstream_ = leader_;
      Frame ack = sim::make_signal(id_, SignalType::Ack);
      ack.packet_index = f.packet_index;
      ack.addressed_to = leader_;
      ctx.emit(std::move(ack));
      if (bitmap_.full()) {
        silence_deadline_ = -1;
        if (!complete_sent_) {
          complete_sent_ = true;
          applied_ = true;
          Frame done = sim::make_signal(id_, SignalType::Complete);
          done.addressed_to = leader_;
          ctx.emit(std::move(done));
        }
      } else {
        silence_deadline_ = step + timeout();
      }
    }
  }

  void act_upstream(AgentContext& ctx, std::int64_t step) {
    switch (phase_) {
      case Phase::ToSlot:
        if (ctx.at(slot())) {
          Frame f = sim::make_signal(id_, SignalType::InPosition);
          f.addressed_to = 0;
          ctx.emit(std::move(f));
          phase_ = Phase::Receiving;
          rx_deadline_ = step + timeout() + shared_->travel;
        } else {
          ctx.steer(slot());
        }
        break;
      case Phase::Receiving:
        if (step >= rx_deadline_) {
          ctx.emit(flood(ctx, SignalType::Abort, memory_));
          ctx.count_abort();
          abort(ctx);
        }
        break;
      case Phase::Returning:
        if (ctx.at(rally_point())) {
          phase_ = Phase::Distributing;
          current_ = 0;
          acked_.clear();
          deadline_ = -1;
          distribute(ctx, step);
        } else {
          ctx.steer(rally_point());
        }
        break;
      case Phase::Distributing:
        distribute(ctx, step);
        break;
      case Phase::AwaitComplete:
        await_complete(ctx, step);
        break;
      case Phase::Done:
        if (!ctx.at(home())) ctx.steer(home());
        break;
      default:
        break;
    }
  }

  Vec2 home() const { return subswarm_ >= 0 ? rally_point() : shared_->home[id_]; }

  bool active(AgentId f) const { return !evicted_.contains(f); }

  void distribute(AgentContext& ctx, std::int64_t step) {
    for (;;) {
      const bool all_acked = std::all_of(followers_.begin(), followers_.end(),
                                         [&](AgentId f) { return !active(f) || acked_.contains(f); });
      if (all_acked) {
        ++current_;
        acked_.clear();
        deadline_ = -1;
        if (current_ >= shared_->packets) {
          phase_ = Phase::AwaitComplete;
          deadline_ = step + timeout();
          await_complete(ctx, step);
          return;
        }
        continue;
      }
      if (deadline_ >= 0 && step >= deadline_) {
        for (auto f : followers_) {
          if (active(f) && !acked_.contains(f)) evict(ctx, f);
        }
        continue;
      }
      break;
    }
    ctx.emit(sim::make_packet(id_, current_, ctx.config().packet_size_bytes));
    if (deadline_ < 0) deadline_ = step + timeout() + (current_ == 0 ? shared_->travel : 0);
  }

  void await_complete(AgentContext& ctx, std::int64_t step) {
    const bool all_done = std::all_of(followers_.begin(), followers_.end(),
                                      [&](AgentId f) { return !active(f) || completed_.contains(f); });
    if (!all_done && step >= deadline_) {
      for (auto f : followers_) {
        if (active(f) && !completed_.contains(f)) evict(ctx, f);
      }
    } else if (!all_done) {
      return;
    }
    ctx.emit(flood(ctx, SignalType::Converged, memory_));
    phase_ = Phase::Done;
  }

  void evict(AgentContext& ctx, AgentId f) {
    evicted_.insert(f);
    ctx.count_eviction();
    shared_->outcome->evicted.push_back(f);
  }

  void act_follower(AgentContext& ctx, std::int64_t step) {
    if (phase_ == Phase::Gathering) {
      const Vec2 point = shared_->home[leader_home_owner()];
      const double radius = shared_->params.gather_fraction * ctx.config().comm_range_m;
      if (sim::distance(ctx.position(), point) > radius) ctx.steer(point);
    }
    if (silence_deadline_ >= 0 && step >= silence_deadline_ && !bitmap_.full()) {
      silence_deadline_ = -1;
      const AgentId old = leader_;
      std::set<AgentId> excluded = replaced_;
      const AgentId next = shared_->successor(subswarm_, excluded, old);
      Frame f = sim::make_signal(id_, SignalType::ReappointLeader);
      f.subject = old;
      f.value = next;
      memory_.remember(f);
      ctx.emit(std::move(f));
      on_reappoint(ctx, old, next);
    }
  }

  AgentId leader_home_owner() const { return shared_->plan.subswarms[subswarm_].leader; }

  std::shared_ptr<const Shared> shared_;
  AgentId id_;
  SwarmSyncRole role_ = SwarmSyncRole::Bystander;
  Phase phase_ = Phase::Idle;
  int subswarm_ = -1;
  bool informed_ = false;
  bool applied_ = false;
  bool aborted_ = false;
  bool complete_sent_ = false;
  PacketBitmap bitmap_;
  FloodMemory memory_;

  AgentId leader_ = sim::kNoAgent;
  AgentId upstream_ = sim::kNoAgent;
  std::vector<AgentId> followers_;
  std::set<AgentId> acked_;
  std::set<AgentId> completed_;
  std::set<AgentId> evicted_;
  std::set<AgentId> replaced_;
  std::int32_t current_ = 0;
  std::int64_t deadline_ = -1;
  std::int64_t rx_deadline_ = -1;
  std::int64_t silence_deadline_ = -1;
  std::int64_t first_rx_ = -1;
  std::int64_t last_rx_ = -1;
};

}  // namespace

std::shared_ptr<RunOutcome> install_swarmsync(sim::World& world, const ProtocolParams& params, int packets) {
  params.validate();
  if (packets < 0) throw sim::ConfigError("packet count must be non-negative");
  const auto& roster = world.roster();
  auto shared = std::make_shared<Shared>();
  shared->params = params;
  shared->packets = packets;
  shared->plan = partition_subswarms(roster, params.max_concurrent);
  shared->subswarm_of.assign(roster.size(), -1);
  shared->is_direct.assign(roster.size(), false);
  shared->outcome = std::make_shared<RunOutcome>();
  shared->travel = travel_allowance(roster, world.config());
  for (const auto& a : roster) shared->home.push_back(a.position);

  const double range = world.config().comm_range_m;
  if (!shared->plan.direct.empty()) {
    const auto& direct = shared->plan.direct;
    std::vector<Vec2> starts;
    for (auto id : direct) {
      shared->is_direct[id] = true;
      starts.push_back(roster[id].position);
    }
    const auto slots = sim::formation_slots(roster[0].position, static_cast<int>(direct.size()), range);
    const auto pick = sim::assign_slots(starts, slots);
    for (std::size_t i = 0; i < direct.size(); ++i) shared->direct_slot[direct[i]] = slots[pick[i]];
  } else if (!shared->plan.subswarms.empty()) {
    const auto& subs = shared->plan.subswarms;
    std::vector<Vec2> starts;
    for (std::size_t s = 0; s < subs.size(); ++s) {
      shared->subswarm_of[subs[s].leader] = static_cast<int>(s);
      for (auto f : subs[s].followers) shared->subswarm_of[f] = static_cast<int>(s);
      starts.push_back(roster[subs[s].leader].position);
    }
    const auto slots = sim::formation_slots(roster[0].position, static_cast<int>(subs.size()), range);
    const auto pick = sim::assign_slots(starts, slots);
    for (std::size_t s = 0; s < subs.size(); ++s) shared->subswarm_slot.push_back(slots[pick[s]]);
  }

  std::shared_ptr<const Shared> view = shared;
  for (const auto& a : roster) {
    if (a.uav_type == AgentType::Updater) {
      world.set_controller(a.id, std::make_unique<SwarmSyncUpdater>(view));
    } else {
      world.set_controller(a.id, std::make_unique<SwarmSyncDrone>(view, a.id));
    }
  }
  return shared->outcome;
}

SwarmSyncRole swarmsync_role(const sim::Controller& controller) {
  const auto* c = dynamic_cast<const SwarmSyncController*>(&controller);
  if (c == nullptr) throw std::invalid_argument("controller is not a SwarmSync agent");
  return c->role();
}

}  // namespace swarmupdate::proto
