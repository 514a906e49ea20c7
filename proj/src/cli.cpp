#include "monlab/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "monlab/error.hpp"
#include "monlab/fitting.hpp"
#include "monlab/format.hpp"
#include "monlab/harness.hpp"
#include "monlab/report.hpp"
#include "monlab/simulation.hpp"

namespace monlab::cli {

namespace fs = std::filesystem;
using report::Manifest;

namespace {

fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MONLAB_OUT"); env && *env) return env;
  return "runs";
}

std::vector<std::string> as_strings(const std::vector<fs::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

// Writes every file, then the manifest as the commit marker.
void commit(const fs::path& dir, Manifest manifest,
            const std::vector<std::pair<std::string, std::string>>& files) {
  fs::create_directories(dir);
  for (const auto& [name, content] : files) {
    report::write_file(dir / name, content);
    manifest.outputs.push_back((dir / name).string());
  }
  manifest.finished = report::utc_timestamp();
  report::write_file(dir / "manifest.json", report::manifest_json(manifest));
}

struct BenchArgs {
  std::string plan;
  std::string run_id;
  std::string out;
  std::string factor = "agent_count";
  std::vector<double> rates;
  std::optional<std::uint64_t> seed;
  int port_base = 0;
  double resource_interval = 1.0;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  Manifest manifest;
  manifest.command = "bench";
  manifest.started = report::utc_timestamp();
  manifest.inputs = {a.plan};

  std::istringstream plan_text(report::read_file(a.plan));
  auto plan = bench::parse_plan(plan_text);
  if (a.seed) plan.seed = *a.seed;
  for (const auto& w : plan.warnings()) err << "warning: " << w << '\n';

  bench::BenchOptions options;
  options.run_id = a.run_id;
  options.port_base = static_cast<std::uint16_t>(a.port_base);
  options.resource_interval = a.resource_interval;
  options.factor_name = a.factor;
  bench::factor_value(plan, a.factor);
  const auto root = output_root(a.out);

  if (a.rates.empty()) {
    const std::string run_id = a.run_id.empty() ? bench::default_run_id(plan) : a.run_id;
    manifest.run_id = run_id;
    const auto dir = root / run_id;
    bench::RunRecord record;
    try {
      record = bench::run_bench(plan, options);
    } catch (const RunAborted& e) {
      manifest.partial = true;
      manifest.error = e.what();
      commit(dir, manifest, {});
      err << "bench aborted: " << e.what() << '\n';
      return kExitAbort;
    }
    manifest.started = record.started_at;
    manifest.outputs = as_strings(report::save_bench_run(dir, record, a.factor));
    manifest.partial = record.aborted;
    manifest.error = record.abort_reason;
    commit(dir, manifest, {});
    out << dir.string() << '\n';
    if (record.aborted) {
      err << "bench aborted: " << record.abort_reason << '\n';
      return kExitAbort;
    }
    return kExitOk;
  }

  // Impact sweep: one run per monitor rate, the lowest being the baseline.
  const std::string sweep_id = a.run_id.empty() ? "impact-s" + std::to_string(plan.seed) : a.run_id;
  manifest.run_id = sweep_id;
  options.run_id = sweep_id;
  const auto sweep_dir = root / sweep_id;
  std::vector<bench::ImpactPoint> points;
  try {
    points = bench::impact_experiment(plan, a.rates, options);
  } catch (const RunAborted& e) {
    manifest.partial = true;
    manifest.error = e.what();
    commit(sweep_dir, manifest, {});
    err << "impact sweep aborted: " << e.what() << '\n';
    return kExitAbort;
  }
  nlohmann::ordered_json j;
  j["run_id"] = sweep_id;
  j["baseline_rate"] = *std::min_element(a.rates.begin(), a.rates.end());
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    if (p.record) {
      const auto written = report::save_bench_run(root / p.run_id, *p.record, "poll_rate");
      for (const auto& w : as_strings(written)) manifest.outputs.push_back(w);
    }
    nlohmann::ordered_json point = {{"rate", p.rate}, {"run_id", p.run_id}, {"valid", p.valid}};
    if (p.valid) {
      const auto impact = management_impact(p.E_baseline, p.E_k, j["baseline_rate"].get<double>(), p.rate);
      point["F"] = p.functional.efficiency_G;
      point["G"] = p.monitoring.efficiency_G;
      point["E_k0"] = p.E_baseline;
      point["E_k"] = p.E_k;
      point["mim"] = impact.mim;
      point["out_of_range"] = impact.out_of_range;
    } else {
      point["invalid_reason"] = p.invalid_reason;
    }
    j["points"].push_back(point);
  }
  commit(sweep_dir, manifest, {{"impact.json", j.dump(2) + "\n"}});
  out << sweep_dir.string() << '\n';
  return kExitOk;
}

struct FitArgs {
  std::string input;
  std::vector<std::string> families;
  std::string run_id;
  std::string out;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  Manifest manifest;
  manifest.command = "fit";
  manifest.started = report::utc_timestamp();
  manifest.inputs = {a.input};
  std::istringstream in(report::read_file(a.input));
  const auto delays = report::read_delays(in);
  std::vector<Family> families;
  for (const auto& name : a.families) {
    const auto f = parse_family(name);
    if (!f) throw InputError("unknown family '" + name + "'");
    families.push_back(*f);
  }
  if (families.empty()) families = {Family::normal, Family::lognormal, Family::weibull};
  const auto fit = select_model(delays, families);
  const auto json = report::fit_json(fit);
  manifest.run_id = a.run_id.empty() ? "fit-" + fs::path(a.input).stem().string() : a.run_id;
  commit(output_root(a.out) / manifest.run_id, manifest, {{"fit.json", json}});
  out << json;
  return kExitOk;
}

struct DeriveArgs {
  std::vector<std::string> runs;
  std::optional<double> baseline_k;
  std::string factor = "agent_count";
  std::string run_id = "derive";
  std::string out;
};

int cmd_derive(const DeriveArgs& a, std::ostream& out) {
  Manifest manifest;
  manifest.command = "derive";
  manifest.started = report::utc_timestamp();
  manifest.run_id = a.run_id;
  manifest.inputs = a.runs;
  std::vector<report::LoadedRun> runs;
  for (const auto& dir : a.runs) runs.push_back(report::load_bench_run(dir, a.factor));
  const auto derived = report::derive(runs, a.factor, a.baseline_k, a.run_id);
  const auto json = report::derived_json(derived);
  commit(output_root(a.out) / a.run_id, manifest, {{"derived.json", json}});
  out << json;
  return kExitOk;
}

struct SimulateArgs {
  std::size_t agents = 1;
  double interval = 1.0;
  double duration = 100.0;
  std::string delay = "weibull:0.7,1";
  std::string process = "rate:1";
  std::string agg = "sum";
  double manager_service = 0.0;
  std::size_t warmup = 3;
  std::uint64_t seed = 1;
  std::string run_id;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  Manifest manifest;
  manifest.command = "simulate";
  manifest.started = report::utc_timestamp();
  SimPlan plan;
  plan.agent_count = a.agents;
  plan.poll_interval = a.interval;
  plan.duration = a.duration;
  plan.delay = parse_delay_model(a.delay);
  plan.process = parse_value_process(a.process);
  plan.aggregation = parse_aggregation(a.agg);
  plan.manager_service = a.manager_service;
  plan.warmup_intervals = a.warmup;
  plan.seed = a.seed;
  plan.validate();
  const auto trace = simulate(plan);
  manifest.run_id = a.run_id.empty()
                        ? "sim-a" + std::to_string(a.agents) + "-s" + std::to_string(a.seed)
                        : a.run_id;
  std::ostringstream csv;
  report::write_trace_csv(csv, trace);
  const auto summary = report::simulation_json(manifest.run_id, plan, trace.summary);
  commit(output_root(a.out) / manifest.run_id, manifest,
         {{"trace.csv", csv.str()}, {"summary.json", summary}});
  out << summary;
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string factor = "agent_count";
  std::optional<double> baseline_k;
  std::string run_id = "report";
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  if (a.inputs.empty()) throw InputError("report: no input run directories");
  Manifest manifest;
  manifest.command = "report";
  manifest.started = report::utc_timestamp();
  manifest.run_id = a.run_id;
  manifest.inputs = a.inputs;
  std::vector<report::LoadedRun> runs;
  std::vector<report::LoadedSimulation> sims;
  for (const auto& dir : a.inputs) {
    if (report::detect_run_kind(dir) == report::RunKind::bench)
      runs.push_back(report::load_bench_run(dir, a.factor));
    else
      sims.push_back(report::load_simulation(dir));
  }
  const auto files = report::build_report(runs, sims, {a.factor, a.baseline_k});
  const auto dir = output_root(a.out) / a.run_id;
  commit(dir, manifest, {files.begin(), files.end()});
  out << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"monlab: monitoring performance measurement toolkit", "monlab"};
  app.set_version_flag("--version", report::tool_version());
  app.require_subcommand(1);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "run a polling benchmark from a plan file");
  bench->add_option("--plan", bench_args.plan, "flat key = value plan file")->required();
  bench->add_option("--run-id", bench_args.run_id, "run directory name");
  bench->add_option("--out", bench_args.out, "output root (default $MONLAB_OUT or ./runs)");
  bench->add_option("--factor", bench_args.factor, "factor tagging the series")
      ->check(CLI::IsMember({"agent_count", "poll_rate", "attributes_per_poll", "monitor_rate"}));
  bench->add_option("--rates", bench_args.rates, "monitor rates for an impact sweep")->delimiter(',');
  bench->add_option("--seed", bench_args.seed, "override the plan seed");
  bench->add_option("--port-base", bench_args.port_base, "first agent port (default ephemeral)")
      ->check(CLI::Range(0, 65535));
  bench->add_option("--resource-interval", bench_args.resource_interval, "resource sampling period (s)")
      ->check(CLI::PositiveNumber);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit delay distributions and select a model");
  fit->add_option("delays", fit_args.input, "delay file or sample CSV")->required();
  fit->add_option("--family", fit_args.families, "candidate family (repeatable)")
      ->check(CLI::IsMember({"normal", "lognormal", "weibull"}));
  fit->add_option("--run-id", fit_args.run_id, "output directory name");
  fit->add_option("--out", fit_args.out, "output root");

  DeriveArgs derive_args;
  auto* derive = app.add_subcommand("derive", "derived metrics over bench runs");
  derive->add_option("runs", derive_args.runs, "bench run directories")->required();
  derive->add_option("--baseline-k", derive_args.baseline_k, "baseline factor value (default smallest)");
  derive->add_option("--factor", derive_args.factor, "factor to compare runs over")
      ->check(CLI::IsMember({"agent_count", "poll_rate", "attributes_per_poll", "monitor_rate"}));
  derive->add_option("--run-id", derive_args.run_id, "output directory name");
  derive->add_option("--out", derive_args.out, "output root");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "aggregation distortion simulation");
  sim->add_option("--agents", sim_args.agents, "agent count")->required()->check(CLI::PositiveNumber);
  sim->add_option("--interval", sim_args.interval, "poll interval (s)")->required();
  sim->add_option("--duration", sim_args.duration, "simulated time (s)")->required();
  sim->add_option("--delay", sim_args.delay, "delay model, e.g. weibull:0.7,1 or const:0");
  sim->add_option("--process", sim_args.process, "rate:R or walk:step[,start]");
  sim->add_option("--agg", sim_args.agg, "sum or mean")->check(CLI::IsMember({"sum", "mean"}));
  sim->add_option("--manager-service", sim_args.manager_service, "manager time per response (s)");
  sim->add_option("--warmup", sim_args.warmup, "poll intervals excluded from the summary");
  sim->add_option("--seed", sim_args.seed, "random seed");
  sim->add_option("--run-id", sim_args.run_id, "output directory name");
  sim->add_option("--out", sim_args.out, "output root");

  ReportArgs report_args;
  auto* rep = app.add_subcommand("report", "plot data and summary from run directories");
  rep->add_option("runs", report_args.inputs, "bench and simulation run directories");
  rep->add_option("--factor", report_args.factor, "factor to compare bench runs over")
      ->check(CLI::IsMember({"agent_count", "poll_rate", "attributes_per_poll", "monitor_rate"}));
  rep->add_option("--baseline-k", report_args.baseline_k, "baseline factor value (default smallest)");
  rep->add_option("--run-id", report_args.run_id, "output directory name");
  rep->add_option("--out", report_args.out, "output root");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << report::tool_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "monlab: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (bench->parsed()) return cmd_bench(bench_args, out, err);
    if (fit->parsed()) return cmd_fit(fit_args, out);
    if (derive->parsed()) return cmd_derive(derive_args, out);
    if (sim->parsed()) return cmd_simulate(sim_args, out);
    return cmd_report(report_args, out);
  } catch (const RunAborted& e) {
    err << "monlab: " << e.what() << '\n';
    return kExitAbort;
  } catch (const std::invalid_argument& e) {  // InputError
    err << "monlab: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::domain_error& e) {
    err << "monlab: " << e.what() << '\n';
    return kExitInput;
  } catch (const FitError& e) {
    err << "monlab: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "monlab: " << e.what() << '\n';
    return kExitAbort;
  }
}

}  // namespace monlab::cli
