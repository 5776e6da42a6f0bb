#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "swarmupdate/exp/config_file.hpp"
#include "swarmupdate/exp/csv.hpp"
#include "swarmupdate/exp/report.hpp"
#include "swarmupdate/exp/scenario.hpp"
#include "swarmupdate/exp/sweep.hpp"
#include "swarmupdate/model/model_io.hpp"
#include "swarmupdate/model/patch.hpp"
#include "swarmupdate/model/profile.hpp"
#include "swarmupdate/model/update.hpp"
#include "swarmupdate/sim/geometry.hpp"
#include "swarmupdate/sim/placement.hpp"

namespace su = swarmupdate;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;

/// Adds `--<key>` for every settings key not in `skip`, collecting values into `out`.
void add_setting_flags(CLI::App* app, su::exp::Settings& out, const std::set<std::string>& skip) {
  for (const auto& key : su::exp::settings_keys()) {
    if (skip.contains(key)) continue;
    app->add_option_function<std::string>(
        "--" + key, [&out, key](const std::string& v) { out[key] = v; }, "override setting '" + key + "'");
  }
}

void print_patch_info(const su::model::PatchFile& patch, std::uint64_t packet_size) {
  fmt::print("base hash    {}\n", su::model::to_hex(patch.base_model_hash));
  fmt::print("target hash  {}\n", su::model::to_hex(patch.target_model_hash));
  fmt::print("payload      {} bytes\n", patch.payload_bytes);
  fmt::print("packets      {} at {} bytes each\n", su::model::packet_count(patch.payload_bytes, packet_size),
             packet_size);
  fmt::print("entries      {}\n\n", patch.entries.size());
  fmt::print("{:<28} {:<6} {:<20} {:>12}\n", "name", "kind", "shape", "bytes");
  for (const auto& e : patch.entries) {
    std::string shape;
    for (auto d : e.shape) shape += (shape.empty() ? "" : "x") + std::to_string(d);
    fmt::print("{:<28} {:<6} {:<20} {:>12}\n", e.name, e.kind == su::model::PatchKind::Delta ? "delta" : "full",
               shape, e.data.size() * 4);
  }
}

void print_metrics_row(const su::exp::SweepRow& row) {
  std::vector<su::exp::SweepRow> rows{row};
  su::exp::write_rows_csv(std::cout, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm model update toolkit: patches, protocol simulation and experiment sweeps"};
  app.require_subcommand(1);

  // patch
  auto* patch = app.add_subcommand("patch", "Generate, apply or inspect model patches");
  patch->require_subcommand(1);
  std::string old_path, new_path, patch_path, out_path, base_path;
  std::uint64_t packet_size = 12500;

  auto* gen = patch->add_subcommand("gen", "Diff two model files into a patch");
  gen->add_option("old", old_path, "base model")->required()->check(CLI::ExistingFile);
  gen->add_option("new", new_path, "updated model")->required()->check(CLI::ExistingFile);
  gen->add_option("-o,--output", out_path, "patch file to write")->required();

  auto* apply = patch->add_subcommand("apply", "Apply a patch to a base model");
  apply->add_option("base", base_path, "base model")->required()->check(CLI::ExistingFile);
  apply->add_option("patch", patch_path, "patch file")->required()->check(CLI::ExistingFile);
  apply->add_option("-o,--output", out_path, "model file to write")->required();

  auto* info = patch->add_subcommand("info", "Describe a patch file");
  info->add_option("patch", patch_path, "patch file")->required()->check(CLI::ExistingFile);
  info->add_option("--packet-size", packet_size, "bytes per radio packet")->check(CLI::PositiveNumber);

  // model
  auto* model = app.add_subcommand("model", "Synthetic model utilities");
  model->require_subcommand(1);
  std::uint64_t model_seed = 0x5eed5;
  std::uint64_t update_seed = 1;
  int frozen = 0;
  auto* synth = model->add_subcommand("synth", "Write the synthetic SqueezeNet-shaped model");
  synth->add_option("-o,--output", out_path, "model file to write")->required();
  synth->add_option("--seed", model_seed, "weight seed");
  auto* update = model->add_subcommand("update", "Retrain a model with a frozen prefix of fire modules");
  update->add_option("base", base_path, "base model")->required()->check(CLI::ExistingFile);
  update->add_option("-o,--output", out_path, "model file to write")->required();
  update->add_option("--frozen", frozen, "number of leading fire modules to freeze (0-8)")->check(CLI::Range(0, 8));
  update->add_option("--seed", update_seed, "update seed");

  // run
  auto* run = app.add_subcommand("run", "Run one scenario and print its metrics row");
  std::string strategy = "swarmsync";
  int size = 20;
  double failure = 0.0;
  std::optional<int> packets;
  std::uint64_t seed = 1;
  std::string latency;
  std::string config_path;
  std::string run_patch;
  bool verbose = false;
  su::exp::Settings run_overrides;
  run->add_option("--strategy", strategy, "swarmsync, gossip or soul");
  run->add_option("--size", size, "number of drones (the Updater is extra)");
  run->add_option("--failure", failure, "per-receiver packet loss probability");
  run->add_option("--packets", packets, "patch size in packets (default 240)");
  run->add_option("--patch", run_patch, "derive the packet count from a patch file")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "run seed");
  run->add_option("--latency", latency, "argos or optimistic");
  run->add_option("--config", config_path, "settings file")->check(CLI::ExistingFile);
  run->add_flag("-v,--verbose", verbose, "print per-run detail to stderr");
  add_setting_flags(run, run_overrides,
                    {"strategy", "swarm_size", "failure_rate", "patch_packets", "seed_base", "latency_mode",
                     "repetitions"});

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write per-run and mean CSVs");
  std::string means_path;
  bool serial = false;
  int threads = 0;
  su::exp::Settings sweep_overrides;
  sweep->add_option("--config", config_path, "settings file")->check(CLI::ExistingFile);
  sweep->add_option("-o,--output", out_path, "per-run CSV")->required();
  sweep->add_option("--means", means_path, "mean CSV (default: <output stem>.means.csv)");
  sweep->add_flag("--serial", serial, "run without the thread pool");
  sweep->add_option("--threads", threads, "worker threads (0 = OpenMP default)");
  add_setting_flags(sweep, sweep_overrides, {});

  // report
  auto* report = app.add_subcommand("report", "Summarize a per-run CSV into tables and charts");
  std::string csv_path;
  report->add_option("csv", csv_path, "per-run CSV")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--output", out_path, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      const auto p = su::model::generate_patch(su::model::load_model_file(old_path),
                                               su::model::load_model_file(new_path));
      const auto bytes = su::model::save_patch_file(p, out_path);
      fmt::print("wrote {} ({} bytes, {} entries)\n", out_path, bytes, p.entries.size());
    } else if (*apply) {
      const auto result = su::model::apply_patch(su::model::load_model_file(base_path),
                                                 su::model::load_patch_file(patch_path));
      const auto bytes = su::model::save_model_file(result, out_path);
      fmt::print("wrote {} ({} bytes)\n", out_path, bytes);
    } else if (*info) {
      print_patch_info(su::model::load_patch_file(patch_path), packet_size);
    } else if (*synth) {
      const auto profile = su::model::synthetic_squeezenet_profile(model_seed);
      const auto bytes = su::model::save_model_file(profile.model, out_path);
      fmt::print("wrote {} ({} bytes, {} tensors)\n", out_path, bytes, profile.model.size());
    } else if (*update) {
      auto spec = su::model::synthetic_squeezenet_profile().freeze;
      spec.frozen_prefix_count = frozen;
      const auto updated = su::model::simulate_update(su::model::load_model_file(base_path), spec, update_seed);
      const auto bytes = su::model::save_model_file(updated, out_path);
      fmt::print("wrote {} ({} bytes)\n", out_path, bytes);
    } else if (*run) {
      su::exp::SweepGrid grid;
      if (!config_path.empty()) su::exp::apply_settings(grid, su::exp::load_settings_file(config_path));
      su::exp::apply_settings(grid, run_overrides);
      auto cfg = grid.base;
      cfg.strategy = su::proto::parse_strategy(strategy);
      cfg.swarm_size = size;
      cfg.failure_rate = failure;
      cfg.seed_base = seed;
      if (!latency.empty()) cfg.world.latency_mode = su::sim::parse_latency_mode(latency);
      if (packets) {
        cfg.patch_packets = *packets;
      } else if (!run_patch.empty()) {
        const auto p = su::model::load_patch_file(run_patch);
        cfg.patch_packets = static_cast<int>(su::model::packet_count(p.payload_bytes, cfg.world.packet_size_bytes));
      }
      su::exp::SweepRow row{cfg.strategy, cfg.swarm_size, cfg.failure_rate, cfg.patch_packets, 0, seed, {}, {}};
      try {
        const auto result = su::exp::run_scenario_detailed(cfg, 0);
        row.metrics = result.metrics;
        if (verbose) {
          spdlog::info("complete={} evicted={} critical_transfer_steps={} aborted={}", result.complete,
                       result.evicted.size(), result.critical_transfer_steps, result.aborted);
        }
      } catch (const su::exp::NonConvergenceError& e) {
        row.metrics = e.partial();
        print_metrics_row(row);
        spdlog::error("{}", e.what());
        return kExitNonConvergence;
      }
      print_metrics_row(row);
      return row.metrics.converged ? 0 : kExitNonConvergence;
    } else if (*sweep) {
      su::exp::SweepGrid grid;
      if (!config_path.empty()) su::exp::apply_settings(grid, su::exp::load_settings_file(config_path));
      su::exp::apply_settings(grid, sweep_overrides);
#ifdef _OPENMP
      if (threads > 0) omp_set_num_threads(threads);
#endif
      auto progress = [](std::size_t done, std::size_t total, const su::exp::SweepCell& c) {
        spdlog::info("[{}/{}] {} size={} f={:.2f} packets={}", done, total, su::proto::to_string(c.strategy),
                     c.swarm_size, c.failure_rate, c.patch_packets);
      };
      const auto rows = serial ? su::exp::run_sweep_serial(grid, progress) : su::exp::run_sweep(grid, progress);
      {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
        su::exp::write_rows_csv(out, rows);
      }
      if (means_path.empty()) {
        std::filesystem::path p(out_path);
        means_path = (p.parent_path() / (p.stem().string() + ".means.csv")).string();
      }
      std::ofstream means(means_path, std::ios::binary | std::ios::trunc);
      if (!means) throw std::runtime_error("cannot write '" + means_path + "'");
      su::exp::write_means_csv(means, su::exp::cell_means(rows));
      std::size_t flagged = 0;
      for (const auto& r : rows) {
        if (!r.error.empty()) {
          ++flagged;
          spdlog::warn("{}", r.error);
        }
      }
      spdlog::info("wrote {} rows to {} and means to {}{}", rows.size(), out_path, means_path,
                   flagged ? fmt::format(" ({} runs did not converge)", flagged) : "");
    } else if (*report) {
      const auto files = su::exp::write_report(su::exp::read_rows_csv_file(csv_path), out_path);
      std::ifstream summary(files.summary);
      std::cout << summary.rdbuf();
    }
  } catch (const su::sim::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const su::model::ConfigurationError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const su::sim::PlacementError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const su::sim::CapacityError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const su::exp::SchemaError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
