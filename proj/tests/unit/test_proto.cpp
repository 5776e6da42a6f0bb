#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>

#include "swarmupdate/exp/scenario.hpp"
#include "swarmupdate/proto/gossip.hpp"
#include "swarmupdate/proto/protocol.hpp"
#include "swarmupdate/proto/soul.hpp"
#include "swarmupdate/proto/swarmsync.hpp"

using namespace swarmupdate;
using proto::ProtocolParams;
using proto::Strategy;
using sim::AgentDescriptor;
using sim::AgentType;
using sim::FrameKind;
using sim::SignalType;

namespace {

class Scripted : public sim::Controller {
 public:
  std::function<void(sim::AgentContext&, sim::Inbox)> on_receive = [](sim::AgentContext&, sim::Inbox) {};
  std::function<void(sim::AgentContext&)> on_act = [](sim::AgentContext&) {};
  void receive(sim::AgentContext& ctx, sim::Inbox inbox) override { on_receive(ctx, inbox); }
  void act(sim::AgentContext& ctx) override { on_act(ctx); }
};

AgentDescriptor drone(sim::AgentId id, AgentType type, sim::Vec2 at, bool needs = true) {
  return {id, type, at, needs};
}

std::vector<AgentDescriptor> updater_and(std::vector<AgentDescriptor> rest) {
  rest.insert(rest.begin(), {0, AgentType::Updater, {0, 0}, false});
  return rest;
}

struct Harness {
  std::unique_ptr<sim::World> world;
  std::shared_ptr<proto::RunOutcome> outcome;

  Harness(Strategy s, std::vector<AgentDescriptor> roster, int packets, sim::WorldConfig cfg = {},
          ProtocolParams params = {}) {
    world = std::make_unique<sim::World>(cfg, std::move(roster));
    world->enable_frame_log(true);
    outcome = proto::install_protocol(s, *world, params, packets);
  }

  std::int64_t run(std::int64_t cap = 100000) {
    while (!outcome->converged && !outcome->updater_aborted && world->current_step() < cap) world->step();
    return outcome->convergence_step;
  }

  proto::DroneStatus status(sim::AgentId id) const {
    return static_cast<const proto::ProtocolAgent*>(world->controller(id))->status();
  }

  std::vector<sim::FrameLogEntry> frames(std::function<bool(const sim::FrameLogEntry&)> pred) const {
    std::vector<sim::FrameLogEntry> out;
    for (const auto& e : world->frame_log()) {
      if (pred(e)) out.push_back(e);
    }
    return out;
  }
};

auto signal_from(sim::AgentId sender, SignalType type) {
  return [=](const sim::FrameLogEntry& e) {
    return e.sender == sender && e.kind == FrameKind::Signal && e.signal == type;
  };
}

auto packet_from(sim::AgentId sender) {
  return [=](const sim::FrameLogEntry& e) { return e.sender == sender && e.kind == FrameKind::Packet; };
}

std::vector<AgentDescriptor> eyebots(int count, double spacing = 0.4) {
  std::vector<AgentDescriptor> out;
  for (int i = 1; i <= count; ++i) out.push_back(drone(i, AgentType::Eyebot, {0.5 + spacing * i, 0.3}));
  return out;
}

exp::ScenarioConfig scenario(Strategy s, int size, double f = 0.0, int packets = 240) {
  exp::ScenarioConfig cfg;
  cfg.strategy = s;
  cfg.swarm_size = size;
  cfg.failure_rate = f;
  cfg.patch_packets = packets;
  cfg.repetitions = 1;
  return cfg;
}

}  // namespace

TEST_SUITE("partition") {
  TEST_CASE("small compatible sets go direct") {
    auto plan = proto::partition_subswarms(updater_and(eyebots(10)), 18);
    CHECK(plan.subswarms.empty());
    CHECK(plan.direct.size() == 10);
  }

  TEST_CASE("250 Eyebots split into 14 balanced sub-swarms") {
    sim::WorldConfig cfg;
    auto roster = updater_and({});
    for (int i = 1; i <= 250; ++i) roster.push_back(drone(i, AgentType::Eyebot, {0.01 * i, 0.02 * (i % 7)}));
    auto plan = proto::partition_subswarms(roster, 18);
    REQUIRE(plan.subswarms.size() == 14);
    std::set<sim::AgentId> seen;
    std::size_t lo = 100, hi = 0;
    for (const auto& s : plan.subswarms) {
      const auto size = s.followers.size() + 1;
      CHECK(size <= 19);
      lo = std::min(lo, size);
      hi = std::max(hi, size);
      CHECK(seen.insert(s.leader).second);
      for (auto f : s.followers) CHECK(seen.insert(f).second);
    }
    CHECK(hi - lo <= 1);
    CHECK(seen.size() == 250);
    // Lowest ids lead.
    for (std::size_t i = 0; i < plan.subswarms.size(); ++i) CHECK(plan.subswarms[i].leader == static_cast<int>(i) + 1);
  }

  TEST_CASE("sub-swarms are homogeneous and exclude incompatible agents") {
    auto roster = updater_and({});
    for (int i = 1; i <= 60; ++i) {
      roster.push_back(drone(i, i % 3 == 0 ? AgentType::Footbot : AgentType::Eyebot, {0.05 * i, 0}, i % 5 != 0));
    }
    auto plan = proto::partition_subswarms(roster, 18);
    for (const auto& s : plan.subswarms) {
      CHECK(roster[s.leader].uav_type == s.uav_type);
      for (auto f : s.followers) {
        CHECK(roster[f].uav_type == s.uav_type);
        CHECK(roster[f].needs_update);
      }
    }
  }

  TEST_CASE("empty and over-capacity sets") {
    CHECK(proto::partition_subswarms(updater_and({}), 18).empty());
    auto roster = updater_and({});
    for (int i = 1; i <= 325; ++i) roster.push_back(drone(i, AgentType::Eyebot, {0, 0}));
    CHECK_THROWS_AS(proto::partition_subswarms(roster, 18), sim::CapacityError);
    roster.pop_back();
    CHECK_NOTHROW(proto::partition_subswarms(roster, 18));
  }
}

TEST_SUITE("swarmsync") {
  TEST_CASE("one recipient, three packets: six steps after InPosition") {
    Harness h(Strategy::SwarmSync, updater_and({drone(1, AgentType::Eyebot, {1.0, 0.0})}), 3);
    h.run();
    REQUIRE(h.outcome->converged);
    auto in_pos = h.frames(signal_from(1, SignalType::InPosition));
    auto acks = h.frames(signal_from(1, SignalType::Ack));
    REQUIRE(in_pos.size() == 1);
    // The current packet is repeated while its Ack is in flight and re-acknowledged.
    std::set<std::int32_t> acked;
    for (const auto& a : acks) acked.insert(a.packet_index);
    CHECK(acked.size() == 3);
    CHECK(acks.back().step - in_pos.front().step == 6);
    std::map<std::int32_t, std::int64_t> first_sent;
    for (const auto& e : h.frames(packet_from(0))) first_sent.emplace(e.packet_index, e.step - in_pos.front().step);
    CHECK(first_sent == std::map<std::int32_t, std::int64_t>{{0, 1}, {1, 3}, {2, 5}});
  }

  TEST_CASE("nothing to update converges at once") {
    Harness h(Strategy::SwarmSync, updater_and({drone(1, AgentType::Footbot, {1, 0}, false)}), 240);
    CHECK(h.run() == 0);
    CHECK(h.world->metrics().packet_emissions == 0);
  }

  TEST_CASE("a leader without followers reports without flying back") {
    ProtocolParams params;
    params.max_concurrent = 2;
    auto roster = updater_and({drone(1, AgentType::Eyebot, {1.5, 0}), drone(2, AgentType::Eyebot, {2.0, 0.5}),
                               drone(3, AgentType::Footbot, {-1.5, 0.4})});
    auto plan = proto::partition_subswarms(roster, 2);
    REQUIRE(plan.subswarms.size() == 2);
    Harness h(Strategy::SwarmSync, roster, 5, {}, params);
    h.run();
    REQUIRE(h.outcome->converged);
    auto acks = h.frames(signal_from(3, SignalType::Ack));
    auto conv = h.frames(signal_from(3, SignalType::Converged));
    REQUIRE(!acks.empty());
    REQUIRE(!conv.empty());
    CHECK(conv.front().step == acks.back().step);
    CHECK(h.world->position(3) != roster[3].position);
  }

  TEST_CASE("followers complete one step after the final packet, once") {
    ProtocolParams params;
    params.max_concurrent = 2;
    auto roster = updater_and({drone(1, AgentType::Eyebot, {1.5, 0}), drone(2, AgentType::Eyebot, {2.0, 0.5}),
                               drone(3, AgentType::Eyebot, {2.2, -0.5})});
    Harness h(Strategy::SwarmSync, roster, 8, {}, params);
    REQUIRE(proto::swarmsync_role(*h.world->controller(1)) == proto::SwarmSyncRole::Leader);
    CHECK(proto::swarmsync_role(*h.world->controller(2)) == proto::SwarmSyncRole::Follower);
    CHECK(proto::swarmsync_role(*h.world->controller(0)) == proto::SwarmSyncRole::Updater);
    h.run();
    REQUIRE(h.outcome->converged);
    auto leader_packets = h.frames(packet_from(1));
    auto final_packet = std::find_if(leader_packets.begin(), leader_packets.end(),
                                     [](const auto& e) { return e.packet_index == 7; });
    REQUIRE(final_packet != leader_packets.end());
    for (sim::AgentId f : {2, 3}) {
      auto done = h.frames(signal_from(f, SignalType::Complete));
      REQUIRE(done.size() == 1);
      CHECK(done.front().step == final_packet->step + 1);
      CHECK(h.status(f).packets_held == 8);
      CHECK(h.status(f).applied);
    }
  }

  TEST_CASE("stop-and-wait never advances past an unacknowledged packet") {
    ProtocolParams params;
    params.max_concurrent = 2;
    sim::WorldConfig cfg;
    cfg.failure_rate = 0.5;
    cfg.seed = 3;
    auto roster = updater_and({drone(1, AgentType::Eyebot, {1.5, 0}), drone(2, AgentType::Eyebot, {2.0, 0.5}),
                               drone(3, AgentType::Eyebot, {2.2, -0.5})});
    Harness h(Strategy::SwarmSync, roster, 12, cfg, params);
    h.run();
    REQUIRE(h.outcome->converged);
    std::map<sim::AgentId, std::map<std::int32_t, std::int64_t>> first_ack;
    for (const auto& e : h.world->frame_log()) {
      if (e.kind == FrameKind::Signal && e.signal == SignalType::Ack) first_ack[e.sender].emplace(e.packet_index, e.step);
    }
    std::int32_t highest = 0;
    int duplicates = 0;
    for (const auto& e : h.frames(packet_from(1))) {
      if (e.packet_index > highest) {
        CHECK(e.packet_index == highest + 1);
        for (sim::AgentId f : {2, 3}) {
          REQUIRE(first_ack[f].contains(highest));
          CHECK(first_ack[f][highest] < e.step);
        }
        highest = e.packet_index;
      } else {
        ++duplicates;
      }
    }
    CHECK(highest == 11);
    CHECK(duplicates > 0);
    for (sim::AgentId f : {2, 3}) CHECK(h.frames(signal_from(f, SignalType::Complete)).size() == 1);
  }

  TEST_CASE("every follower holds the full patch at convergence") {
    auto cfg = scenario(Strategy::SwarmSync, 100, 0.0, 64);
    auto r = exp::run_scenario_detailed(cfg, 0);
    CHECK(r.metrics.converged);
    CHECK(r.complete);
    CHECK(r.evicted.empty());
  }
}

TEST_SUITE("fault injection") {
  TEST_CASE("silenced leader is replaced at the deadline") {
    auto cfg = scenario(Strategy::SwarmSync, 100);
    cfg.record_frames = true;
    const auto wc = exp::world_config_for(cfg, 0);
    auto plan = proto::partition_subswarms(sim::place_swarm(cfg.swarm_size, cfg.mix, wc), cfg.params.max_concurrent);
    REQUIRE(plan.subswarms.size() >= 2);
    const auto leader = plan.subswarms[0].leader;

    auto clean = exp::run_scenario_detailed(cfg, 0);
    std::vector<std::int64_t> updater_packets;
    for (const auto& e : clean.frame_log) {
      if (e.sender == 0 && e.kind == FrameKind::Packet) updater_packets.push_back(e.step);
    }
    REQUIRE(!updater_packets.empty());
    const auto mid = updater_packets[updater_packets.size() / 2];

    cfg.faults = {{leader, mid}};
    auto r = exp::run_scenario_detailed(cfg, 0);
    std::int64_t reappoint = -1;
    for (const auto& e : r.frame_log) {
      if (e.sender == 0 && e.kind == FrameKind::Signal && e.signal == SignalType::ReappointLeader) {
        reappoint = e.step;
        break;
      }
    }
    REQUIRE(reappoint > mid);
    // The packet in flight when the deadline fires was first sent timeout_steps earlier.
    std::int32_t pending = -1;
    std::int64_t first_sent = -1;
    for (const auto& e : r.frame_log) {
      if (e.step >= reappoint) break;
      if (e.sender != 0 || e.kind != FrameKind::Packet) continue;
      if (e.packet_index != pending) {
        pending = e.packet_index;
        first_sent = e.step;
      }
    }
    CHECK(reappoint == first_sent + cfg.params.timeout_steps);
    CHECK(r.metrics.converged);
    CHECK(r.complete);
    CHECK_FALSE(r.aborted);
  }

  TEST_CASE("silenced follower is evicted") {
    auto cfg = scenario(Strategy::SwarmSync, 100);
    const auto wc = exp::world_config_for(cfg, 0);
    auto plan = proto::partition_subswarms(sim::place_swarm(cfg.swarm_size, cfg.mix, wc), cfg.params.max_concurrent);
    REQUIRE(!plan.subswarms.empty());
    const auto follower = plan.subswarms[0].followers.at(0);
    cfg.faults = {{follower, 0}};
    auto r = exp::run_scenario_detailed(cfg, 0);
    CHECK(r.metrics.converged);
    CHECK(r.complete);
    REQUIRE(r.evicted.size() == 1);
    CHECK(r.evicted[0] == follower);
    CHECK(r.metrics.evictions == 1);
  }

  TEST_CASE("silenced Updater aborts everyone without partial application") {
    auto cfg = scenario(Strategy::SwarmSync, 100);
    cfg.record_frames = true;
    cfg.faults = {{0, 150}};
    auto r = exp::run_scenario_detailed(cfg, 0);
    CHECK(r.aborted);
    CHECK_FALSE(r.metrics.converged);
    CHECK(r.no_partial_apply);
    CHECK(r.metrics.aborts >= 1);
    for (std::size_t id = 1; id < r.drones.size(); ++id) {
      CHECK(r.drones[id].aborted);
      CHECK_FALSE(r.drones[id].applied);
    }
    auto again = exp::run_scenario_detailed(cfg, 0);
    CHECK(again.metrics.convergence_steps == r.metrics.convergence_steps);
    CHECK(again.frame_log.size() == r.frame_log.size());
  }
}

TEST_SUITE("cycle bounds") {
  TEST_CASE("one cycle up to N, two up to N squared") {
    for (auto [size, cycles] : {std::pair{20, 1}, std::pair{200, 2}}) {
      CAPTURE(size);
      auto cfg = scenario(Strategy::SwarmSync, size, 0.0, 240);
      cfg.world.latency_mode = sim::LatencyMode::Optimistic;
      auto r = exp::run_scenario_detailed(cfg, 0);
      REQUIRE(r.metrics.converged);
      const auto needed = (r.critical_transfer_steps + 239) / 240;
      CHECK(needed == cycles);
    }
  }
}

TEST_SUITE("gossip") {
  TEST_CASE("two agents, four packets") {
    Harness h(Strategy::Gossip, updater_and({drone(1, AgentType::Eyebot, {1, 0})}), 4);
    for (int i = 0; i < 4; ++i) h.world->step();
    CHECK(h.status(1).packets_held == 3);
    CHECK_FALSE(proto::gossip_rebroadcasting(*h.world->controller(1)));
    h.world->step();
    CHECK(h.status(1).packets_held == 4);
    CHECK(proto::gossip_rebroadcasting(*h.world->controller(1)));
    h.run();
    auto own = h.frames(packet_from(1));
    REQUIRE(!own.empty());
    CHECK(own.front().step == 5);
    // Quiet window: the requested cycle ends at step 8, Converged follows 20 steps later.
    auto conv = h.frames(signal_from(1, SignalType::Converged));
    REQUIRE(conv.size() == 1);
    CHECK(conv.front().step == 8 + 20);
    CHECK(h.outcome->converged);
  }

  TEST_CASE("quiescence counts exactly quiescence_steps") {
    ProtocolParams params;
    params.quiescence_steps = 7;
    Harness h(Strategy::Gossip, updater_and({drone(1, AgentType::Eyebot, {1, 0})}), 4, {}, params);
    h.run();
    auto conv = h.frames(signal_from(1, SignalType::Converged));
    REQUIRE(conv.size() == 1);
    CHECK(conv.front().step == 8 + 7);
  }

  TEST_CASE("retransmission cycles at f = 0.5") {
    double total = 0;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
      sim::WorldConfig cfg;
      cfg.failure_rate = 0.5;
      cfg.seed = static_cast<std::uint64_t>(s);
      Harness h(Strategy::Gossip, updater_and({drone(1, AgentType::Eyebot, {1, 0})}), 4, cfg);
      while (!proto::gossip_rebroadcasting(*h.world->controller(1))) {
        h.world->step();
        REQUIRE(h.world->current_step() < 2000);
      }
      const auto full_at = h.world->current_step() - 1;
      total += static_cast<double>((full_at + 3) / 4 - 1);
    }
    const double mean = total / seeds;
    CHECK(mean >= 1.0);
    CHECK(mean <= 3.0);
  }

  TEST_CASE("footbots relay signals but never packets; infection is monotone") {
    sim::WorldConfig cfg;
    cfg.failure_rate = 0.5;
    cfg.seed = 9;
    auto roster = sim::place_swarm(20, {}, cfg);
    Harness h(Strategy::Gossip, roster, 16, cfg);
    std::size_t infected = 0;
    while (!h.outcome->converged) {
      h.world->step();
      std::size_t now = 0;
      for (const auto& a : roster) now += proto::gossip_rebroadcasting(*h.world->controller(a.id));
      CHECK(now >= infected);
      infected = now;
      REQUIRE(h.world->current_step() < 50000);
    }
    std::uint64_t footbot_packets = 0, footbot_signals = 0;
    for (const auto& e : h.world->frame_log()) {
      if (roster[e.sender].uav_type != AgentType::Footbot) continue;
      (e.kind == FrameKind::Packet ? footbot_packets : footbot_signals) += e.payload_bytes;
    }
    CHECK(footbot_packets == 0);
    CHECK(footbot_signals > 0);
    for (const auto& a : roster) {
      if (a.uav_type == AgentType::Eyebot) CHECK(h.status(a.id).applied);
    }
  }
}

TEST_SUITE("soul") {
  TEST_CASE("grouping") {
    auto roster = updater_and({});
    for (int i = 1; i <= 250; ++i) roster.push_back(drone(i, AgentType::Eyebot, {0, 0}));
    auto groups = proto::soul_groups(roster, 18);
    REQUIRE(groups.size() == 14);
    std::size_t total = 0;
    for (const auto& g : groups) {
      CHECK(g.size() <= 18);
      CHECK(g.size() >= 17);
      total += g.size();
    }
    CHECK(total == 250);
    CHECK(proto::soul_groups(updater_and({}), 18).empty());
  }

  TEST_CASE("single lossless drone: one blast then the quiet wait") {
    Harness h(Strategy::Soul, updater_and({drone(1, AgentType::Eyebot, {1, 0})}), 64);
    const auto done = h.run();
    CHECK(h.world->metrics().packet_emissions == 64);
    CHECK(h.frames(signal_from(1, SignalType::RetransmitRequest)).empty());
    CHECK(done == h.frames(packet_from(0)).back().step + 20);
    CHECK(h.status(1).applied);
  }

  TEST_CASE("selective rebroadcast sends exactly the requested packets") {
    Harness h(Strategy::Soul, updater_and({drone(1, AgentType::Eyebot, {1, 0})}), 10);
    auto bidder = std::make_unique<Scripted>();
    bool summoned = false, asked = false, round_over = false;
    std::int64_t asked_at = -1;
    bidder->on_receive = [&](sim::AgentContext&, sim::Inbox inbox) {
      for (const auto* f : inbox) {
        if (f->is_signal(SignalType::GroupTurn)) summoned = true;
        if (f->is_packet() && f->remaining == 0) round_over = true;
      }
    };
    bidder->on_act = [&](sim::AgentContext& ctx) {
      if (summoned) {
        summoned = false;
        auto f = sim::make_signal(1, SignalType::AtLocation);
        f.addressed_to = 0;
        ctx.emit(f);
      }
      if (round_over && !asked) {
        asked = true;
        asked_at = ctx.step();
        auto f = sim::make_signal(1, SignalType::RetransmitRequest);
        f.addressed_to = 0;
        f.indices = std::make_shared<const std::vector<std::int32_t>>(std::vector<std::int32_t>{3, 7});
        ctx.emit(f);
      }
    };
    h.world->set_controller(1, std::move(bidder));
    h.run();
    REQUIRE(asked);
    std::vector<std::pair<std::int64_t, std::int32_t>> resent;
    for (const auto& e : h.frames(packet_from(0))) {
      if (e.step > asked_at) resent.emplace_back(e.step, e.packet_index);
    }
    REQUIRE(resent.size() == 2);
    CHECK(resent[0] == std::pair<std::int64_t, std::int32_t>{asked_at + 1, 3});
    CHECK(resent[1] == std::pair<std::int64_t, std::int32_t>{asked_at + 2, 7});
  }

  TEST_CASE("about a quarter of the blast is missing at f = 0.25") {
    double total = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
      sim::WorldConfig cfg;
      cfg.failure_rate = 0.25;
      cfg.seed = static_cast<std::uint64_t>(s) + 100;
      Harness h(Strategy::Soul, updater_and({drone(1, AgentType::Eyebot, {1, 0})}), 240, cfg);
      while (h.world->metrics().packet_emissions < 240) h.world->step();
      h.world->step();
      total += 240.0 - h.status(1).packets_held;
      h.run();
      CHECK(h.status(1).applied);
    }
    const double mean = total / seeds;
    CHECK(mean >= 45.0);
    CHECK(mean <= 75.0);
  }

  TEST_CASE("later groups wait their turn") {
    sim::WorldConfig cfg;
    cfg.seed = 4;
    auto roster = sim::place_swarm(60, {}, cfg);
    auto groups = proto::soul_groups(roster, 18);
    REQUIRE(groups.size() == 2);
    Harness h(Strategy::Soul, roster, 32, cfg);
    std::set<sim::AgentId> later(groups[1].begin(), groups[1].end());
    auto turns = [&] { return h.frames(signal_from(0, SignalType::GroupTurn)).size(); };
    while (turns() < 2) {
      h.world->step();
      for (auto id : later) CHECK(h.world->position(id) == roster[id].position);
      REQUIRE(h.world->current_step() < 20000);
    }
    for (const auto& e : h.world->frame_log()) {
      if (!later.contains(e.sender)) continue;
      const bool relay = e.kind == FrameKind::Signal &&
                         (e.signal == SignalType::UpdateAvailable || e.signal == SignalType::GroupTurn);
      CHECK(relay);
    }
    h.run();
    for (auto id : later) CHECK(h.status(id).applied);
  }
}

TEST_SUITE("completeness") {
  TEST_CASE("all strategies deliver everything under loss") {
    for (auto s : {Strategy::SwarmSync, Strategy::Gossip, Strategy::Soul}) {
      for (double f : {0.25, 0.75}) {
        CAPTURE(proto::to_string(s));
        CAPTURE(f);
        auto r = exp::run_scenario_detailed(scenario(s, 20, f, 24), 0);
        CHECK(r.metrics.converged);
        CHECK(r.complete);
        CHECK(r.no_partial_apply);
      }
    }
  }

  TEST_CASE("strategy names") {
    CHECK(proto::parse_strategy("gossip") == Strategy::Gossip);
    CHECK(proto::to_string(Strategy::Soul) == "soul");
    CHECK_THROWS_AS(proto::parse_strategy("flood"), sim::ConfigError);
  }
}
