#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmupdate/exp/sweep.hpp"

namespace swarmupdate::exp {

inline constexpr const char* kRowsHeader =
    "strategy,swarm_size,failure_rate,patch_packets,rep,seed,convergence_steps,steps_per_drone,overhead_bytes,"
    "overhead_per_drone_bytes,packet_emissions,signal_emissions,evictions,aborts,converged";

inline constexpr const char* kMeansHeader =
    "strategy,swarm_size,failure_rate,patch_packets,reps,convergence_steps,steps_per_drone,overhead_bytes,"
    "overhead_per_drone_bytes,packet_emissions,signal_emissions,evictions,aborts,converged_fraction";

/// Column-level problem in an input CSV.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string column, const std::string& what) : std::runtime_error(what), column_(std::move(column)) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

/// Mean of every metric over the repetitions of one cell.
struct CellMean {
  proto::Strategy strategy = proto::Strategy::SwarmSync;
  int swarm_size = 0;
  double failure_rate = 0.0;
  int patch_packets = 0;
  int reps = 0;
  double convergence_steps = 0;
  double steps_per_drone = 0;
  double overhead_bytes = 0;
  double overhead_per_drone_bytes = 0;
  double packet_emissions = 0;
  double signal_emissions = 0;
  double evictions = 0;
  double aborts = 0;
  double converged_fraction = 0;
};

/// Groups rows by cell, keeping first-appearance order.
std::vector<CellMean> cell_means(const std::vector<SweepRow>& rows);

/// Writes one line per row; floats use 6 decimals and lines end in LF.
void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_means_csv(std::ostream& out, const std::vector<CellMean>& means);

/// Parses a rows CSV. Columns may appear in any order; extra columns are
/// ignored. Throws SchemaError naming the offending column.
std::vector<SweepRow> read_rows_csv(std::istream& in);
std::vector<SweepRow> read_rows_csv_file(const std::filesystem::path& path);

}  // namespace swarmupdate::exp
