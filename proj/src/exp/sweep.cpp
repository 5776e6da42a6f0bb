#include "swarmupdate/exp/sweep.hpp"

#include <algorithm>
#include <exception>
#include <map>

namespace swarmupdate::exp {

void SweepGrid::validate() const {
  if (cell_count() == 0) throw sim::ConfigError("sweep grid is empty");
  for (const auto& cell : sweep_cells(*this)) cell.config.validate();
}

SweepGrid main_grid() { return SweepGrid{}; }

SweepGrid patch_size_grid() {
  SweepGrid g;
  g.sizes = {200};
  g.failure_rates = {0.25};
  g.packets = {240, 192, 128, 64};
  return g;
}

std::vector<SweepCell> sweep_cells(const SweepGrid& grid) {
  std::vector<SweepCell> cells;
  cells.reserve(grid.cell_count());
  for (auto s : grid.strategies) {
    for (auto n : grid.sizes) {
      for (auto f : grid.failure_rates) {
        for (auto p : grid.packets) {
          ScenarioConfig c = grid.base;
          c.strategy = s;
          c.swarm_size = n;
          c.failure_rate = f;
          c.patch_packets = p;
          cells.push_back({s, n, f, p, std::move(c)});
        }
      }
    }
  }
  return cells;
}

namespace {

SweepRow run_one(const SweepCell& cell, int rep) {
  SweepRow row{cell.strategy, cell.swarm_size, cell.failure_rate, cell.patch_packets, rep,
               world_config_for(cell.config, rep).seed, {}, {}};
  try {
    row.metrics = run_scenario(cell.config, rep);
  } catch (const NonConvergenceError& e) {
    row.metrics = e.partial();
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep_serial(const SweepGrid& grid, const SweepProgress& progress) {
  grid.validate();
  const auto cells = sweep_cells(grid);
  const int reps = grid.base.repetitions;
  std::vector<SweepRow> rows;
  rows.reserve(cells.size() * reps);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int r = 0; r < reps; ++r) rows.push_back(run_one(cells[c], r));
    if (progress) progress(c + 1, cells.size(), cells[c]);
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, const SweepProgress& progress) {
  grid.validate();
  const auto cells = sweep_cells(grid);
  const int reps = grid.base.repetitions;
  const auto total = static_cast<std::ptrdiff_t>(cells.size() * reps);
  std::vector<SweepRow> rows(static_cast<std::size_t>(total));
  std::vector<int> remaining(cells.size(), reps);
  std::size_t cells_done = 0;
  std::exception_ptr failure;

  // Big swarms first so the long runs do not end up last on one thread.
  std::vector<std::ptrdiff_t> order(static_cast<std::size_t>(total));
  for (std::ptrdiff_t i = 0; i < total; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return cells[a / reps].swarm_size > cells[b / reps].swarm_size;
  });

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const auto i = order[k];
    const auto c = static_cast<std::size_t>(i / reps);
    try {
      rows[i] = run_one(cells[c], static_cast<int>(i % reps));
    } catch (...) {
#pragma omp critical(sweep_failure)
      if (!failure) failure = std::current_exception();
    }
#pragma omp critical(sweep_progress)
    {
      if (--remaining[c] == 0) {
        ++cells_done;
        if (progress) progress(cells_done, cells.size(), cells[c]);
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace swarmupdate::exp
