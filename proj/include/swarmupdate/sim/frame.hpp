#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace swarmupdate::sim {

using AgentId = std::int32_t;
inline constexpr AgentId kNoAgent = -1;

enum class AgentType : std::uint8_t { Updater, Footbot, Eyebot };

std::string to_string(AgentType type);

enum class FrameKind : std::uint8_t { Packet, Signal };

enum class SignalType : std::uint8_t {
  None,
  UpdateAvailable,
  InPosition,
  Ack,
  Complete,
  Converged,
  Abort,
  ReappointLeader,
  RetransmitRequest,
  GroupTurn,
  AtLocation,
};

inline constexpr int kSignalTypeCount = 11;

std::string to_string(SignalType type);

/// Fixed on-air size of each control signal in bytes.
std::uint32_t signal_bytes(SignalType type);

/// One radio emission. Protocols use the optional fields as they see fit;
/// the channel only looks at sender, kind, payload size and addressee.
struct Frame {
  AgentId sender = kNoAgent;
  FrameKind kind = FrameKind::Signal;
  SignalType signal = SignalType::None;
  std::int32_t packet_index = -1;
  std::uint32_t payload_bytes = 0;
  /// Intended reader. Every agent in range still hears the frame; the field
  /// lets protocols ignore traffic meant for someone else.
  std::optional<AgentId> addressed_to;

  /// Agent that originated a relayed signal.
  AgentId origin = kNoAgent;
  /// Agent the signal is about (e.g. the leader being replaced).
  AgentId subject = kNoAgent;
  /// Small protocol-defined payload (packet count, group index, ...).
  std::int64_t value = 0;
  std::int32_t round = 0;
  std::int32_t remaining = 0;
  std::shared_ptr<const std::vector<std::int32_t>> indices;

  bool is_packet() const { return kind == FrameKind::Packet; }
  bool is_signal(SignalType t) const { return kind == FrameKind::Signal && signal == t; }
  bool for_me(AgentId self) const { return !addressed_to || *addressed_to == self; }
};

Frame make_packet(AgentId sender, std::int32_t index, std::uint32_t packet_size_bytes);
Frame make_signal(AgentId sender, SignalType type);

}  // namespace swarmupdate::sim
