#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "qem/errors.hpp"
#include "qem/harness.hpp"

namespace qem::harness {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json to_json(const zne::ScaledPoint& pt) {
  return json{{"lambda", pt.lambda},
              {"expectation", pt.expectation},
              {"shots", pt.shots},
              {"discarded", pt.discarded},
              {"discard_reason", pt.discard_reason}};
}

zne::ScaledPoint scaled_point_from(const json& j) {
  zne::ScaledPoint pt;
  pt.lambda = j.at("lambda").get<int>();
  pt.expectation = j.at("expectation").get<double>();
  pt.shots = j.at("shots").get<long long>();
  pt.discarded = j.at("discarded").get<bool>();
  pt.discard_reason = j.at("discard_reason").get<std::string>();
  return pt;
}

json to_json(const zne::ZneEstimate& est) {
  json points = json::array();
  for (const auto& pt : est.points_used) points.push_back(to_json(pt));
  return json{{"value", est.value},
              {"method", zne::method_name(est.method)},
              {"points_used", points},
              {"has_fit", est.has_fit},
              {"fit_a", est.fit_a},
              {"fit_b", est.fit_b},
              {"fit_p", est.fit_p},
              {"clipped", est.clipped},
              {"warning", est.warning}};
}

zne::ZneEstimate zne_estimate_from(const json& j) {
  zne::ZneEstimate est;
  est.value = j.at("value").get<double>();
  est.method = zne::method_from_name(j.at("method").get<std::string>());
  for (const auto& pt : j.at("points_used")) {
    est.points_used.push_back(scaled_point_from(pt));
  }
  est.has_fit = j.at("has_fit").get<bool>();
  est.fit_a = j.at("fit_a").get<double>();
  est.fit_b = j.at("fit_b").get<double>();
  est.fit_p = j.at("fit_p").get<double>();
  est.clipped = j.at("clipped").get<bool>();
  est.warning = j.at("warning").get<std::string>();
  return est;
}

json to_json(const blockfit::FidelityPoint& pt) {
  return json{{"k", pt.k},
              {"depth", pt.depth()},
              {"fidelity", pt.fidelity},
              {"shots", pt.shots},
              {"discarded", pt.discarded},
              {"discard_reason", pt.discard_reason}};
}

blockfit::FidelityPoint fidelity_point_from(const json& j) {
  blockfit::FidelityPoint pt;
  pt.k = j.at("k").get<int>();
  pt.fidelity = j.at("fidelity").get<double>();
  pt.shots = j.at("shots").get<long long>();
  pt.discarded = j.at("discarded").get<bool>();
  pt.discard_reason = j.at("discard_reason").get<std::string>();
  return pt;
}

json to_json(const blockfit::DecayFit& fit) {
  return json{{"c", fit.c},
              {"f", fit.f},
              {"method", blockfit::fit_method_name(fit.method)},
              {"residual", fit.residual},
              {"per_k_estimates", fit.per_k_estimates},
              {"f_clamped", fit.f_clamped},
              {"warning", fit.warning}};
}

blockfit::DecayFit decay_fit_from(const json& j) {
  blockfit::DecayFit fit;
  fit.c = j.at("c").get<double>();
  fit.f = j.at("f").get<double>();
  fit.method = blockfit::fit_method_from_name(j.at("method").get<std::string>());
  fit.residual = j.at("residual").get<double>();
  fit.per_k_estimates = j.at("per_k_estimates").get<std::vector<double>>();
  fit.f_clamped = j.at("f_clamped").get<bool>();
  fit.warning = j.at("warning").get<std::string>();
  return fit;
}

json to_json(const ExperimentConfig& cfg) {
  return json{{"n_qubits", cfg.n_qubits},
              {"target", cfg.target},
              {"shots", cfg.shots},
              {"repeats", cfg.repeats},
              {"p1", cfg.p1},
              {"p2", cfg.p2},
              {"base_seed", cfg.base_seed},
              {"lambda_grid", cfg.lambda_grid},
              {"k_grid", cfg.k_grid},
              {"zne_method", zne::method_name(cfg.zne_method)},
              {"c_policy", blockfit::c_policy_name(cfg.c_policy)},
              {"output_dir", cfg.output_dir}};
}

ExperimentConfig config_from(const json& j) {
  ExperimentConfig cfg;
  cfg.n_qubits = j.at("n_qubits").get<int>();
  cfg.target = j.at("target").get<std::string>();
  cfg.shots = j.at("shots").get<long long>();
  cfg.repeats = j.at("repeats").get<int>();
  cfg.p1 = j.at("p1").get<double>();
  cfg.p2 = j.at("p2").get<double>();
  cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  cfg.lambda_grid = j.at("lambda_grid").get<std::vector<int>>();
  cfg.k_grid = j.at("k_grid").get<std::vector<int>>();
  cfg.zne_method = zne::method_from_name(j.at("zne_method").get<std::string>());
  cfg.c_policy = blockfit::c_policy_from_name(j.at("c_policy").get<std::string>());
  cfg.output_dir = j.at("output_dir").get<std::string>();
  return cfg;
}

json to_json(const Aggregate& agg) {
  return json{{"mean", agg.mean}, {"stddev", agg.stddev}};
}

Aggregate aggregate_from(const json& j) {
  Aggregate agg;
  agg.mean = j.at("mean").get<double>();
  agg.stddev = j.at("stddev").get<double>();
  return agg;
}

json report_json(const ExperimentReport& report) {
  json runs = json::array();
  for (const RunRecord& run : report.runs) {
    json zne_points = json::array();
    for (const auto& pt : run.zne_points) zne_points.push_back(to_json(pt));
    json fid_points = json::array();
    for (const auto& pt : run.fidelity_points) fid_points.push_back(to_json(pt));
    runs.push_back(json{{"run_id", run.run_id},
                        {"p_raw", run.p_raw},
                        {"zne_points", zne_points},
                        {"zne_estimate", to_json(run.zne_estimate)},
                        {"fidelity_points", fid_points},
                        {"decay_fit", to_json(run.decay_fit)},
                        {"p_mit", run.p_mit},
                        {"mit_clipped", run.mit_clipped}});
  }

  json mean_expectations = json::array();
  for (const auto& pt : report.mean_expectations) {
    mean_expectations.push_back(to_json(pt));
  }
  json mean_fidelities = json::array();
  for (const auto& pt : report.mean_fidelities) {
    mean_fidelities.push_back(to_json(pt));
  }

  json references = json::array();
  for (const ReferenceDelta& d : report.references) {
    references.push_back(json{{"quantity", d.quantity},
                              {"ours", d.ours},
                              {"reference", d.reference},
                              {"delta", d.delta},
                              {"tolerance", d.tolerance},
                              {"checked", d.checked},
                              {"within_tolerance", d.within_tolerance}});
  }

  return json{{"config", to_json(report.config)},
              {"r", report.r},
              {"theoretical", report.theoretical},
              {"runs", runs},
              {"aggregates",
               json{{"p_raw", to_json(report.p_raw)},
                    {"p_zne", to_json(report.p_zne)},
                    {"p_mit", to_json(report.p_mit)},
                    {"mean_expectations", mean_expectations},
                    {"pooled_zne", to_json(report.pooled_zne)},
                    {"mean_fidelities", mean_fidelities},
                    {"pooled_fit", to_json(report.pooled_fit)},
                    {"pooled_p_mit", report.pooled_p_mit},
                    {"pooled_mit_clipped", report.pooled_mit_clipped}}},
              {"parts", json{{"zne", report.parts.zne}, {"block", report.parts.block}}},
              {"references", references}};
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  return report_json(report).dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("report_from_json: ") + e.what());
  }

  ExperimentReport report;
  report.config = config_from(j.at("config"));
  report.r = j.at("r").get<int>();
  report.theoretical = j.at("theoretical").get<double>();
  for (const auto& run_json : j.at("runs")) {
    RunRecord run;
    run.run_id = run_json.at("run_id").get<int>();
    run.p_raw = run_json.at("p_raw").get<double>();
    for (const auto& pt : run_json.at("zne_points")) {
      run.zne_points.push_back(scaled_point_from(pt));
    }
    run.zne_estimate = zne_estimate_from(run_json.at("zne_estimate"));
    for (const auto& pt : run_json.at("fidelity_points")) {
      run.fidelity_points.push_back(fidelity_point_from(pt));
    }
    run.decay_fit = decay_fit_from(run_json.at("decay_fit"));
    run.p_mit = run_json.at("p_mit").get<double>();
    run.mit_clipped = run_json.at("mit_clipped").get<bool>();
    report.runs.push_back(std::move(run));
  }
  const auto& agg = j.at("aggregates");
  report.p_raw = aggregate_from(agg.at("p_raw"));
  report.p_zne = aggregate_from(agg.at("p_zne"));
  report.p_mit = aggregate_from(agg.at("p_mit"));
  for (const auto& pt : agg.at("mean_expectations")) {
    report.mean_expectations.push_back(scaled_point_from(pt));
  }
  report.pooled_zne = zne_estimate_from(agg.at("pooled_zne"));
  for (const auto& pt : agg.at("mean_fidelities")) {
    report.mean_fidelities.push_back(fidelity_point_from(pt));
  }
  report.pooled_fit = decay_fit_from(agg.at("pooled_fit"));
  report.pooled_p_mit = agg.at("pooled_p_mit").get<double>();
  report.pooled_mit_clipped = agg.at("pooled_mit_clipped").get<bool>();
  report.parts.zne = j.at("parts").at("zne").get<bool>();
  report.parts.block = j.at("parts").at("block").get<bool>();
  for (const auto& d_json : j.at("references")) {
    ReferenceDelta d;
    d.quantity = d_json.at("quantity").get<std::string>();
    d.ours = d_json.at("ours").get<double>();
    d.reference = d_json.at("reference").get<double>();
    d.delta = d_json.at("delta").get<double>();
    d.tolerance = d_json.at("tolerance").get<double>();
    d.checked = d_json.at("checked").get<bool>();
    d.within_tolerance = d_json.at("within_tolerance").get<bool>();
    report.references.push_back(std::move(d));
  }
  return report;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "run_id,method,n_qubits,target,p1,p2,shots,lambda_or_2k,raw_value,"
         "fitted_f,fitted_c,estimate,clipped,discarded\n";

  const std::string prefix_tail = "," + std::to_string(report.config.n_qubits) + "," +
                                  report.config.target + "," +
                                  fmt_double(report.config.p1) + "," +
                                  fmt_double(report.config.p2) + "," +
                                  std::to_string(report.config.shots) + ",";
  auto row = [&](const std::string& run_id, const std::string& method,
                 const std::string& lambda_or_2k, const std::string& raw_value,
                 const std::string& fitted_f, const std::string& fitted_c,
                 const std::string& estimate, const std::string& clipped,
                 const std::string& discarded) {
    out << run_id << "," << method << prefix_tail << lambda_or_2k << ","
        << raw_value << "," << fitted_f << "," << fitted_c << "," << estimate
        << "," << clipped << "," << discarded << "\n";
  };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };

  for (const RunRecord& run : report.runs) {
    const std::string id = std::to_string(run.run_id);
    row(id, "raw", "", fmt_double(run.p_raw), "", "", fmt_double(run.p_raw),
        "false", "false");
    for (const auto& pt : run.zne_points) {
      row(id, "zne_point", std::to_string(pt.lambda), fmt_double(pt.expectation),
          "", "", "", "", flag(pt.discarded));
    }
    if (report.parts.zne) {
      row(id, "zne", "", "", "", "", fmt_double(run.zne_estimate.value),
          flag(run.zne_estimate.clipped), "false");
    }
    for (const auto& pt : run.fidelity_points) {
      row(id, "block_point", std::to_string(pt.depth()), fmt_double(pt.fidelity),
          "", "", "", "", flag(pt.discarded));
    }
    if (report.parts.block) {
      row(id, "blockfit", "", "", fmt_double(run.decay_fit.f),
          fmt_double(run.decay_fit.c), fmt_double(run.p_mit), flag(run.mit_clipped),
          "false");
    }
  }

  if (!report.runs.empty()) {
    row("mean", "raw", "", fmt_double(report.p_raw.mean), "", "",
        fmt_double(report.p_raw.mean), "false", "false");
    row("std", "raw", "", fmt_double(report.p_raw.stddev), "", "",
        fmt_double(report.p_raw.stddev), "false", "false");
    if (report.parts.zne) {
      row("mean", "zne", "", "", "", "", fmt_double(report.p_zne.mean), "", "false");
      row("std", "zne", "", "", "", "", fmt_double(report.p_zne.stddev), "", "false");
    }
    if (report.parts.block) {
      row("mean", "blockfit", "", "", "", "", fmt_double(report.p_mit.mean), "",
          "false");
      row("std", "blockfit", "", "", "", "", fmt_double(report.p_mit.stddev), "",
          "false");
    }
  }
  for (const auto& pt : report.mean_expectations) {
    row("pooled", "zne_point", std::to_string(pt.lambda), fmt_double(pt.expectation),
        "", "", "", "", flag(pt.discarded));
  }
  if (report.parts.zne) {
    row("pooled", "zne", "", "", "", "", fmt_double(report.pooled_zne.value),
        flag(report.pooled_zne.clipped), "false");
  }
  for (const auto& pt : report.mean_fidelities) {
    row("pooled", "block_point", std::to_string(pt.depth()), fmt_double(pt.fidelity),
        "", "", "", "", flag(pt.discarded));
  }
  if (report.parts.block) {
    row("pooled", "blockfit", "", "", fmt_double(report.pooled_fit.f),
        fmt_double(report.pooled_fit.c), fmt_double(report.pooled_p_mit),
        flag(report.pooled_mit_clipped), "false");
  }
  return out.str();
}

std::string plotdata_to_json(const std::vector<ExperimentReport>& reports) {
  json groups = json::array();
  for (const ExperimentReport& report : reports) {
    json bars = json::array();
    bars.push_back(json{{"name", "theoretical"}, {"value", report.theoretical}});
    bars.push_back(json{{"name", "unmitigated"}, {"value", report.p_raw.mean}});
    if (report.parts.zne) {
      bars.push_back(json{{"name", "p_zne"}, {"value", report.pooled_zne.value}});
    }
    if (report.parts.block) {
      bars.push_back(json{{"name", "p_mit"}, {"value", report.pooled_p_mit}});
    }
    groups.push_back(json{{"label", "q" + std::to_string(report.config.n_qubits) +
                                        " p2=" + fmt_double(report.config.p2)},
                          {"bars", bars}});
  }
  return json{{"title", "success probability by method"}, {"groups", groups}}
             .dump(2) +
         "\n";
}

std::string report_stem(const ExperimentReport& report) {
  return "q" + std::to_string(report.config.n_qubits) + "_p1_" +
         fmt_double(report.config.p1) + "_p2_" + fmt_double(report.config.p2) +
         "_seed" + std::to_string(report.config.base_seed);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  const std::string tmp = path + ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    if (!out.good()) throw IoError("short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp + " into place: " + ec.message());
  }
}

std::vector<std::string> export_report(const ExperimentReport& report,
                                       const std::string& format,
                                       const std::string& out_dir) {
  if (format != "json" && format != "csv" && format != "plotdata" &&
      format != "all") {
    throw ValidationError("export_report: unknown format '" + format +
                          "' (expected json, csv, plotdata or all)");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir);

  const std::string stem = (std::filesystem::path(out_dir) / report_stem(report)).string();
  std::vector<std::string> written;
  if (format == "json" || format == "all") {
    const std::string path = stem + ".json";
    write_file_atomic(path, report_to_json(report));
    written.push_back(path);
  }
  if (format == "csv" || format == "all") {
    const std::string path = stem + ".csv";
    write_file_atomic(path, report_to_csv(report));
    written.push_back(path);
  }
  if (format == "plotdata" || format == "all") {
    const std::string path = stem + "_plotdata.json";
    write_file_atomic(path, plotdata_to_json({report}));
    written.push_back(path);
  }
  return written;
}

}  // namespace qem::harness
