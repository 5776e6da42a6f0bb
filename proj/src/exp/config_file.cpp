#include "swarmupdate/exp/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace swarmupdate::exp {

namespace {

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

template <typename T>
T number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (t.empty() || ec != std::errc{} || ptr != end) {
    throw sim::ConfigError("setting '" + key + "': invalid number '" + t + "'");
  }
  return value;
}

template <typename T>
std::vector<T> list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number<T>(key, item));
  if (out.empty()) throw sim::ConfigError("setting '" + key + "' needs at least one value");
  return out;
}

}  // namespace

Settings parse_settings(std::istream& in) {
  Settings out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw sim::ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw sim::ConfigError("line " + std::to_string(line_no) + ": empty key");
    out[key] = value;
  }
  return out;
}

Settings load_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw sim::ConfigError("cannot open config file '" + path.string() + "'");
  return parse_settings(in);
}

const std::vector<std::string>& settings_keys() {
  static const std::vector<std::string> keys{
      "strategy",       "swarm_size",         "failure_rate",     "patch_packets",   "repetitions",
      "seed_base",      "step_cap",           "control_step_ms",  "comm_range_m",    "max_speed_mps",
      "packet_size_bytes", "latency_mode",    "arena_side_m",     "eyebot_fraction", "max_concurrent",
      "timeout_steps",  "quiescence_steps",   "group_size",       "request_silence_steps",
      "rerequest_steps", "gather_fraction"};
  return keys;
}

void apply_settings(SweepGrid& grid, const Settings& settings) {
  auto& b = grid.base;
  for (const auto& [key, value] : settings) {
    if (key == "strategy") {
      grid.strategies.clear();
      std::istringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) grid.strategies.push_back(proto::parse_strategy(trim(item)));
      if (grid.strategies.empty()) throw sim::ConfigError("setting 'strategy' needs at least one value");
    } else if (key == "swarm_size") {
      grid.sizes = list<int>(key, value);
    } else if (key == "failure_rate") {
      grid.failure_rates = list<double>(key, value);
    } else if (key == "patch_packets") {
      grid.packets = list<int>(key, value);
    } else if (key == "repetitions") {
      b.repetitions = number<int>(key, value);
    } else if (key == "seed_base") {
      b.seed_base = number<std::uint64_t>(key, value);
    } else if (key == "step_cap") {
      b.step_cap = number<std::int64_t>(key, value);
    } else if (key == "control_step_ms") {
      b.world.control_step_ms = number<double>(key, value);
    } else if (key == "comm_range_m") {
      b.world.comm_range_m = number<double>(key, value);
    } else if (key == "max_speed_mps") {
      b.world.max_speed_mps = number<double>(key, value);
    } else if (key == "packet_size_bytes") {
      b.world.packet_size_bytes = number<std::uint32_t>(key, value);
    } else if (key == "latency_mode") {
      b.world.latency_mode = sim::parse_latency_mode(trim(value));
    } else if (key == "arena_side_m") {
      b.world.arena_side_m = number<double>(key, value);
    } else if (key == "eyebot_fraction") {
      b.mix.eyebot_fraction = number<double>(key, value);
    } else if (key == "max_concurrent") {
      b.params.max_concurrent = number<int>(key, value);
    } else if (key == "timeout_steps") {
      b.params.timeout_steps = number<int>(key, value);
    } else if (key == "quiescence_steps") {
      b.params.quiescence_steps = number<int>(key, value);
    } else if (key == "group_size") {
      b.params.group_size = number<int>(key, value);
    } else if (key == "request_silence_steps") {
      b.params.request_silence_steps = number<int>(key, value);
    } else if (key == "rerequest_steps") {
      b.params.rerequest_steps = number<int>(key, value);
    } else if (key == "gather_fraction") {
      b.params.gather_fraction = number<double>(key, value);
    } else {
      throw sim::ConfigError("unknown setting '" + key + "'");
    }
  }
}

}  // namespace swarmupdate::exp
