// Command-line front end: run experiments, single-method runs, reference
// reproduction, and error-rate sweeps. Progress goes to stderr, result file
// paths to stdout. Exit codes: 0 success, 1 validation error, 2 numerical or
// fit failure, 3 I/O error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qem/errors.hpp"
#include "qem/harness.hpp"

namespace {

using qem::harness::ExperimentConfig;
using qem::harness::ExperimentReport;

struct CommonFlags {
  std::string config_path;
  int qubits = 0;
  std::string target;
  long long shots = 0;
  int repeats = 0;
  double p1 = -1.0;
  double p2 = -1.0;
  std::uint64_t seed = 0;
  std::vector<int> lambdas;
  std::vector<int> ks;
  std::string zne_method;
  std::string c_policy;
  std::string out;
  std::string format = "all";
};

void add_common_options(CLI::App* cmd, CommonFlags& flags, bool with_noise) {
  cmd->add_option("--config", flags.config_path,
                  "JSON config file mirroring the experiment config; flags "
                  "override file values");
  cmd->add_option("--qubits", flags.qubits, "register width (2..12)");
  cmd->add_option("--target", flags.target, "marked bitstring (default all ones)");
  cmd->add_option("--shots", flags.shots, "shots per measurement");
  cmd->add_option("--repeats", flags.repeats, "independent runs");
  if (with_noise) {
    cmd->add_option("--p1", flags.p1, "depolarizing probability per 1-qubit gate");
    cmd->add_option("--p2", flags.p2, "depolarizing probability per 2-qubit gate");
  }
  cmd->add_option("--seed", flags.seed, "base seed; per-run seeds are derived");
  cmd->add_option("--lambdas", flags.lambdas, "noise scales, e.g. 1,3,5")
      ->delimiter(',');
  cmd->add_option("--ks", flags.ks, "block-pair repetition counts, e.g. 1,2,3")
      ->delimiter(',');
  cmd->add_option("--zne-method", flags.zne_method,
                  "richardson | exponential | loglinear");
  cmd->add_option("--c-policy", flags.c_policy, "assume_unit | fit");
  cmd->add_option("--out", flags.out, "output directory (default results)");
  cmd->add_option("--format", flags.format, "json | csv | plotdata | all");
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qem::IoError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw qem::ValidationError("config file " + path + ": " + e.what());
  }
  ExperimentConfig cfg;
  if (j.contains("n_qubits")) cfg.n_qubits = j.at("n_qubits").get<int>();
  if (j.contains("target")) cfg.target = j.at("target").get<std::string>();
  if (j.contains("shots")) cfg.shots = j.at("shots").get<long long>();
  if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<int>();
  if (j.contains("p1")) cfg.p1 = j.at("p1").get<double>();
  if (j.contains("p2")) cfg.p2 = j.at("p2").get<double>();
  if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("lambda_grid")) {
    cfg.lambda_grid = j.at("lambda_grid").get<std::vector<int>>();
  }
  if (j.contains("k_grid")) cfg.k_grid = j.at("k_grid").get<std::vector<int>>();
  if (j.contains("zne_method")) {
    cfg.zne_method = qem::zne::method_from_name(j.at("zne_method").get<std::string>());
  }
  if (j.contains("c_policy")) {
    cfg.c_policy =
        qem::blockfit::c_policy_from_name(j.at("c_policy").get<std::string>());
  }
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  return cfg;
}

ExperimentConfig resolve_config(const CLI::App* cmd, const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = config_from_file(flags.config_path);

  auto set_if = [&](const char* name, auto setter) {
    if (cmd->count(name) > 0) setter();
  };
  set_if("--qubits", [&] { cfg.n_qubits = flags.qubits; });
  set_if("--target", [&] { cfg.target = flags.target; });
  set_if("--shots", [&] { cfg.shots = flags.shots; });
  set_if("--repeats", [&] { cfg.repeats = flags.repeats; });
  if (cmd->get_option_no_throw("--p1") != nullptr) {
    set_if("--p1", [&] { cfg.p1 = flags.p1; });
    set_if("--p2", [&] { cfg.p2 = flags.p2; });
  }
  set_if("--seed", [&] { cfg.base_seed = flags.seed; });
  set_if("--lambdas", [&] { cfg.lambda_grid = flags.lambdas; });
  set_if("--ks", [&] { cfg.k_grid = flags.ks; });
  set_if("--zne-method",
         [&] { cfg.zne_method = qem::zne::method_from_name(flags.zne_method); });
  set_if("--c-policy",
         [&] { cfg.c_policy = qem::blockfit::c_policy_from_name(flags.c_policy); });
  set_if("--out", [&] { cfg.output_dir = flags.out; });
  return cfg;
}

void print_summary(const ExperimentReport& report) {
  std::cerr << "q" << report.config.n_qubits << " r=" << report.r
            << " p1=" << report.config.p1 << " p2=" << report.config.p2
            << ": theoretical=" << report.theoretical;
  if (!report.runs.empty()) std::cerr << " p_raw=" << report.p_raw.mean;
  if (report.parts.zne) std::cerr << " p_zne=" << report.pooled_zne.value;
  if (report.parts.block) std::cerr << " p_mit=" << report.pooled_p_mit;
  std::cerr << "\n";
}

void print_references(const ExperimentReport& report) {
  for (const auto& d : report.references) {
    std::cerr << (d.checked ? (d.within_tolerance ? "  ok    " : "  FAIL  ")
                            : "  info  ")
              << d.quantity << ": ours=" << d.ours << " reference=" << d.reference
              << " delta=" << d.delta;
    if (d.checked) std::cerr << " tolerance=" << d.tolerance;
    std::cerr << "\n";
  }
}

void emit_paths(const std::vector<std::string>& paths) {
  for (const std::string& path : paths) std::cout << path << "\n";
}

int run_reports(const std::vector<ExperimentReport>& reports,
                const std::string& format, const std::string& out_dir,
                const std::string& stem_prefix) {
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    ExperimentReport report = reports[i];
    report.config.output_dir = out_dir;
    for (const std::string& p :
         qem::harness::export_report(report, format, out_dir)) {
      paths.push_back(p);
    }
    print_summary(report);
    print_references(report);
    (void)stem_prefix;
    (void)i;
  }
  if (reports.size() > 1 && (format == "plotdata" || format == "all")) {
    const std::string path =
        (std::filesystem::path(out_dir) / (stem_prefix + "_plotdata.json")).string();
    qem::harness::write_file_atomic(path, qem::harness::plotdata_to_json(reports));
    paths.push_back(path);
  }
  emit_paths(paths);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noisy Grover simulator with ZNE and block-level error mitigation"};
  app.require_subcommand(1);

  CommonFlags run_flags, zne_flags, block_flags, sweep_flags;
  int table_id = 0;
  std::string reproduce_out = "results";
  std::string reproduce_format = "all";
  std::uint64_t reproduce_seed = ExperimentConfig{}.base_seed;
  std::vector<double> sweep_p2;
  std::vector<double> sweep_p1;
  bool parallel = false;

  CLI::App* cmd_run = app.add_subcommand(
      "run", "full experiment: unmitigated, ZNE and block mitigation");
  add_common_options(cmd_run, run_flags, true);

  CLI::App* cmd_zne =
      app.add_subcommand("zne", "unmitigated and ZNE pipelines only");
  add_common_options(cmd_zne, zne_flags, true);

  CLI::App* cmd_block =
      app.add_subcommand("blockfit", "unmitigated and block pipelines only");
  add_common_options(cmd_block, block_flags, true);

  CLI::App* cmd_repro =
      app.add_subcommand("reproduce", "check results against bundled reference tables");
  cmd_repro->add_option("--table", table_id, "reference table id: 1, 2 or 3")
      ->required();
  cmd_repro->add_option("--out", reproduce_out, "output directory");
  cmd_repro->add_option("--format", reproduce_format, "json | csv | plotdata | all");
  cmd_repro->add_option("--seed", reproduce_seed, "base seed for the simulated rows");

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run a grid of two-qubit error rates");
  add_common_options(cmd_sweep, sweep_flags, false);
  cmd_sweep->add_option("--p2", sweep_p2, "two-qubit error rates, e.g. 0.005,0.001")
      ->delimiter(',');
  cmd_sweep->add_option("--p1", sweep_p1,
                        "one-qubit error rates (default p2/10 per point)")
      ->delimiter(',');
  cmd_sweep->add_flag("--parallel", parallel, "run grid points concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_run->parsed()) {
      const ExperimentConfig cfg = resolve_config(cmd_run, run_flags);
      std::cerr << "running full experiment...\n";
      return run_reports({qem::harness::run_experiment(cfg)}, run_flags.format,
                         cfg.output_dir, "run");
    }
    if (cmd_zne->parsed()) {
      const ExperimentConfig cfg = resolve_config(cmd_zne, zne_flags);
      std::cerr << "running ZNE pipeline...\n";
      return run_reports(
          {qem::harness::run_experiment(cfg, qem::harness::Parts{true, false})},
          zne_flags.format, cfg.output_dir, "zne");
    }
    if (cmd_block->parsed()) {
      const ExperimentConfig cfg = resolve_config(cmd_block, block_flags);
      std::cerr << "running block pipeline...\n";
      return run_reports(
          {qem::harness::run_experiment(cfg, qem::harness::Parts{false, true})},
          block_flags.format, cfg.output_dir, "blockfit");
    }
    if (cmd_repro->parsed()) {
      std::cerr << "reproducing reference table " << table_id << "...\n";
      const auto reports = qem::harness::reproduce(table_id, reproduce_seed);
      std::vector<std::string> paths;
      for (std::size_t i = 0; i < reports.size(); ++i) {
        ExperimentReport report = reports[i];
        report.config.output_dir = reproduce_out;
        std::error_code ec;
        std::filesystem::create_directories(reproduce_out, ec);
        if (ec) throw qem::IoError("cannot create output directory " + reproduce_out);
        const std::string stem =
            (std::filesystem::path(reproduce_out) /
             ("table" + std::to_string(table_id) + "_row" + std::to_string(i) + "_" +
              qem::harness::report_stem(report)))
                .string();
        if (reproduce_format == "json" || reproduce_format == "all") {
          qem::harness::write_file_atomic(stem + ".json",
                                          qem::harness::report_to_json(report));
          paths.push_back(stem + ".json");
        }
        if (reproduce_format == "csv" || reproduce_format == "all") {
          qem::harness::write_file_atomic(stem + ".csv",
                                          qem::harness::report_to_csv(report));
          paths.push_back(stem + ".csv");
        }
        print_summary(report);
        print_references(report);
      }
      emit_paths(paths);
      if (!qem::harness::all_checked_deltas_pass(reports)) {
        std::cerr << "reference checks failed\n";
        return 2;
      }
      return 0;
    }
    if (cmd_sweep->parsed()) {
      const ExperimentConfig base = resolve_config(cmd_sweep, sweep_flags);
      if (sweep_p2.empty()) sweep_p2 = {0.005, 0.001, 0.0005};
      if (!sweep_p1.empty() && sweep_p1.size() != sweep_p2.size()) {
        throw qem::ValidationError("sweep: --p1 list must match --p2 list length");
      }
      std::vector<ExperimentConfig> configs;
      for (std::size_t i = 0; i < sweep_p2.size(); ++i) {
        ExperimentConfig cfg = base;
        cfg.p2 = sweep_p2[i];
        cfg.p1 = i < sweep_p1.size() ? sweep_p1[i] : sweep_p2[i] / 10.0;
        configs.push_back(cfg);
      }
      std::cerr << "sweeping " << configs.size() << " error rates"
                << (parallel ? " in parallel" : "") << "...\n";
      const auto reports = qem::harness::run_sweep(configs, parallel);
      return run_reports(reports, sweep_flags.format, base.output_dir, "sweep");
    }
  } catch (const qem::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const qem::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qem::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
