#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swarmupdate/exp/scenario.hpp"

namespace swarmupdate::exp {

struct SweepGrid {
  std::vector<proto::Strategy> strategies{proto::Strategy::SwarmSync, proto::Strategy::Gossip, proto::Strategy::Soul};
  std::vector<int> sizes{20, 100, 200, 500};
  std::vector<double> failure_rates{0.0, 0.25, 0.5, 0.75};
  std::vector<int> packets{240};
  /// Everything else (repetitions, seed_base, world, params, cap).
  ScenarioConfig base;

  std::size_t cell_count() const { return strategies.size() * sizes.size() * failure_rates.size() * packets.size(); }
  void validate() const;
};

/// Main grid: 4 sizes x 4 failure rates x 3 strategies, 240 packets.
SweepGrid main_grid();
/// Patch-size study: size 200, f = 0.25, packets {240, 192, 128, 64}.
SweepGrid patch_size_grid();

struct SweepRow {
  proto::Strategy strategy = proto::Strategy::SwarmSync;
  int swarm_size = 0;
  double failure_rate = 0.0;
  int patch_packets = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  MetricsRecord metrics;
  std::string error;  // set when the run failed to converge
};

/// One cell of the grid and its scenario configuration.
struct SweepCell {
  proto::Strategy strategy;
  int swarm_size;
  double failure_rate;
  int patch_packets;
  ScenarioConfig config;
};

/// Cells in grid order: strategy, size, failure rate, packets (last varies fastest).
std::vector<SweepCell> sweep_cells(const SweepGrid& grid);

/// Called once per finished cell with (cells done, total cells, cell).
using SweepProgress = std::function<void(std::size_t, std::size_t, const SweepCell&)>;

/// Runs every (cell, repetition) on the OpenMP thread pool. Rows come back
/// in grid order whatever the completion order.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, const SweepProgress& progress = {});
/// Same rows, computed one run at a time.
std::vector<SweepRow> run_sweep_serial(const SweepGrid& grid, const SweepProgress& progress = {});

}  // namespace swarmupdate::exp
