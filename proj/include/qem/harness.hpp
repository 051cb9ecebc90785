#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qem/blockfit.hpp"
#include "qem/circuit.hpp"
#include "qem/simulator.hpp"
#include "qem/zne.hpp"

namespace qem::harness {

struct ExperimentConfig {
  int n_qubits = 6;
  std::string target;  // empty means all-ones
  long long shots = 4000;
  int repeats = 10;
  double p1 = 1e-4;
  double p2 = 1e-3;
  std::uint64_t base_seed = 42;
  std::vector<int> lambda_grid = {1, 3, 5};
  std::vector<int> k_grid;  // empty means 1..max(floor(r_opt/2), 2)
  zne::Method zne_method = zne::Method::richardson;
  blockfit::CPolicy c_policy = blockfit::CPolicy::assume_unit;
  std::string output_dir = "results";

  // Throws ValidationError naming the offending field.
  void validate() const;
  std::string resolved_target() const;
  std::vector<int> resolved_k_grid() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Which measurement pipelines an experiment executes.
struct Parts {
  bool zne = true;
  bool block = true;
};

struct RunRecord {
  int run_id = 0;
  double p_raw = 0.0;
  std::vector<zne::ScaledPoint> zne_points;
  zne::ZneEstimate zne_estimate;
  std::vector<blockfit::FidelityPoint> fidelity_points;
  blockfit::DecayFit decay_fit;
  double p_mit = 0.0;
  bool mit_clipped = false;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

// One compared quantity in reproduce mode. `checked` rows gate the exit
// status; the rest are informational.
struct ReferenceDelta {
  std::string quantity;
  double ours = 0.0;
  double reference = 0.0;
  double delta = 0.0;
  double tolerance = 0.0;
  bool checked = false;
  bool within_tolerance = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  int r = 0;  // resolved block count (optimal iterations)
  double theoretical = 0.0;
  std::vector<RunRecord> runs;
  Aggregate p_raw;
  Aggregate p_zne;
  Aggregate p_mit;
  // pooled estimates over run-averaged inputs
  std::vector<zne::ScaledPoint> mean_expectations;
  zne::ZneEstimate pooled_zne;
  std::vector<blockfit::FidelityPoint> mean_fidelities;
  blockfit::DecayFit pooled_fit;
  double pooled_p_mit = 0.0;
  bool pooled_mit_clipped = false;
  Parts parts;
  std::vector<ReferenceDelta> references;
};

// Runs the unmitigated, ZNE and block pipelines with derived per-run seeds.
// Deterministic in the config; no timestamps enter the report.
ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config, Parts parts);

// Reference reproduction. Tables 1 and 3 run the matching simulator
// configurations and attach deltas; table 2 re-derives the fitting and
// extrapolation arithmetic from the stored hardware inputs without
// simulating.
std::vector<ExperimentReport> reproduce(int table_id);
std::vector<ExperimentReport> reproduce(int table_id, std::uint64_t base_seed);

// True when every checked delta of every report is within tolerance.
bool all_checked_deltas_pass(const std::vector<ExperimentReport>& reports);

// Runs several configs, optionally in parallel; results are identical
// either way.
std::vector<ExperimentReport> run_sweep(const std::vector<ExperimentConfig>& configs,
                                        bool parallel);

// --- serialization / export ---

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
std::string report_to_csv(const ExperimentReport& report);
// Grouped-bar data (theoretical / unmitigated / p_zne / p_mit per group).
std::string plotdata_to_json(const std::vector<ExperimentReport>& reports);

// Writes the report in the requested format ("json", "csv", "plotdata" or
// "all") into out_dir, atomically; returns the written paths.
std::vector<std::string> export_report(const ExperimentReport& report,
                                       const std::string& format,
                                       const std::string& out_dir);

// Deterministic file stem for a config, e.g. "q6_p1_0.0001_p2_0.001_seed42".
std::string report_stem(const ExperimentReport& report);

void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace qem::harness
