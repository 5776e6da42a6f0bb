#include "swarmupdate/exp/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace swarmupdate::exp {

std::vector<CellMean> cell_means(const std::vector<SweepRow>& rows) {
  using Key = std::tuple<proto::Strategy, int, double, int>;
  std::map<Key, std::size_t> index;
  std::vector<CellMean> means;
  for (const auto& r : rows) {
    const Key key{r.strategy, r.swarm_size, r.failure_rate, r.patch_packets};
    auto [it, fresh] = index.try_emplace(key, means.size());
    if (fresh) {
      CellMean m;
      m.strategy = r.strategy;
      m.swarm_size = r.swarm_size;
      m.failure_rate = r.failure_rate;
      m.patch_packets = r.patch_packets;
      means.push_back(m);
    }
    auto& m = means[it->second];
    const auto& x = r.metrics;
    ++m.reps;
    m.convergence_steps += static_cast<double>(x.convergence_steps);
    m.steps_per_drone += x.steps_per_drone;
    m.overhead_bytes += static_cast<double>(x.overhead_bytes);
    m.overhead_per_drone_bytes += x.overhead_per_drone_bytes;
    m.packet_emissions += static_cast<double>(x.packet_emissions);
    m.signal_emissions += static_cast<double>(x.signal_emissions);
    m.evictions += static_cast<double>(x.evictions);
    m.aborts += static_cast<double>(x.aborts);
    m.converged_fraction += x.converged ? 1.0 : 0.0;
  }
  for (auto& m : means) {
    const double n = m.reps;
    for (double* v : {&m.convergence_steps, &m.steps_per_drone, &m.overhead_bytes, &m.overhead_per_drone_bytes,
                      &m.packet_emissions, &m.signal_emissions, &m.evictions, &m.aborts, &m.converged_fraction}) {
      *v /= n;
    }
  }
  return means;
}

void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kRowsHeader << '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << fmt::format("{},{},{:.6f},{},{},{},{},{:.6f},{},{:.6f},{},{},{},{},{}\n", proto::to_string(r.strategy),
                       r.swarm_size, r.failure_rate, r.patch_packets, r.rep, r.seed, m.convergence_steps,
                       m.steps_per_drone, m.overhead_bytes, m.overhead_per_drone_bytes, m.packet_emissions,
                       m.signal_emissions, m.evictions, m.aborts, m.converged ? 1 : 0);
  }
}

void write_means_csv(std::ostream& out, const std::vector<CellMean>& means) {
  out << kMeansHeader << '\n';
  for (const auto& m : means) {
    out << fmt::format("{},{},{:.6f},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n",
                       proto::to_string(m.strategy), m.swarm_size, m.failure_rate, m.patch_packets, m.reps,
                       m.convergence_steps, m.steps_per_drone, m.overhead_bytes, m.overhead_per_drone_bytes,
                       m.packet_emissions, m.signal_emissions, m.evictions, m.aborts, m.converged_fraction);
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& column, std::size_t line) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw SchemaError(column, fmt::format("line {}: column '{}' has invalid value '{}'", line, column, text));
  }
  return value;
}

}  // namespace

std::vector<SweepRow> read_rows_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("", "CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const auto& name : split(kRowsHeader)) {
    if (!col.contains(name)) throw SchemaError(name, "CSV is missing required column '" + name + "'");
  }

  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw SchemaError("", fmt::format("line {}: expected {} fields, found {}", line_no, header.size(), cells.size()));
    }
    auto get = [&](const char* name) -> const std::string& { return cells[col.at(name)]; };
    SweepRow r;
    try {
      r.strategy = proto::parse_strategy(get("strategy"));
    } catch (const std::exception&) {
      throw SchemaError("strategy", fmt::format("line {}: unknown strategy '{}'", line_no, get("strategy")));
    }
    r.swarm_size = parse_number<int>(get("swarm_size"), "swarm_size", line_no);
    r.failure_rate = parse_number<double>(get("failure_rate"), "failure_rate", line_no);
    r.patch_packets = parse_number<int>(get("patch_packets"), "patch_packets", line_no);
    r.rep = parse_number<int>(get("rep"), "rep", line_no);
    r.seed = parse_number<std::uint64_t>(get("seed"), "seed", line_no);
    auto& m = r.metrics;
    m.convergence_steps = parse_number<std::int64_t>(get("convergence_steps"), "convergence_steps", line_no);
    m.steps_per_drone = parse_number<double>(get("steps_per_drone"), "steps_per_drone", line_no);
    m.overhead_bytes = parse_number<std::uint64_t>(get("overhead_bytes"), "overhead_bytes", line_no);
    m.overhead_per_drone_bytes =
        parse_number<double>(get("overhead_per_drone_bytes"), "overhead_per_drone_bytes", line_no);
    m.packet_emissions = parse_number<std::uint64_t>(get("packet_emissions"), "packet_emissions", line_no);
    m.signal_emissions = parse_number<std::uint64_t>(get("signal_emissions"), "signal_emissions", line_no);
    m.evictions = parse_number<std::uint64_t>(get("evictions"), "evictions", line_no);
    m.aborts = parse_number<std::uint64_t>(get("aborts"), "aborts", line_no);
    const auto conv = parse_number<int>(get("converged"), "converged", line_no);
    if (conv != 0 && conv != 1) throw SchemaError("converged", fmt::format("line {}: converged must be 0 or 1", line_no));
    m.converged = conv == 1;
    rows.push_back(r);
  }
  return rows;
}

std::vector<SweepRow> read_rows_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_rows_csv(in);
}

}  // namespace swarmupdate::exp
