#include "swarmupdate/sim/frame.hpp"

namespace swarmupdate::sim {

std::string to_string(AgentType type) {
  switch (type) {
    case AgentType::Updater: return "Updater";
    case AgentType::Footbot: return "Footbot";
    case AgentType::Eyebot: return "Eyebot";
  }
  return "?";
}

std::string to_string(SignalType type) {
  switch (type) {
    case SignalType::None: return "None";
    case SignalType::UpdateAvailable: return "UpdateAvailable";
    case SignalType::InPosition: return "InPosition";
    case SignalType::Ack: return "Ack";
    case SignalType::Complete: return "Complete";
    case SignalType::Converged: return "Converged";
    case SignalType::Abort: return "Abort";
    case SignalType::ReappointLeader: return "ReappointLeader";
    case SignalType::RetransmitRequest: return "RetransmitRequest";
    case SignalType::GroupTurn: return "GroupTurn";
    case SignalType::AtLocation: return "AtLocation";
  }
  return "?";
}

std::uint32_t signal_bytes(SignalType type) {
  switch (type) {
    case SignalType::UpdateAvailable: return 10;
    case SignalType::InPosition: return 2;
    case SignalType::Ack: return 1;
    case SignalType::Complete: return 3;
    case SignalType::Converged: return 3;
    case SignalType::Abort: return 2;
    case SignalType::ReappointLeader: return 4;
    case SignalType::RetransmitRequest: return 8;
    case SignalType::GroupTurn: return 5;
    case SignalType::AtLocation: return 2;
    case SignalType::None: break;
  }
  return 0;
}

Frame make_packet(AgentId sender, std::int32_t index, std::uint32_t packet_size_bytes) {
  Frame f;
  f.sender = sender;
  f.kind = FrameKind::Packet;
  f.packet_index = index;
  f.payload_bytes = packet_size_bytes;
  return f;
}

Frame make_signal(AgentId sender, SignalType type) {
  Frame f;
  f.sender = sender;
  f.kind = FrameKind::Signal;
  f.signal = type;
  f.payload_bytes = signal_bytes(type);
  f.origin = sender;
  return f;
}

}  // namespace swarmupdate::sim
