#include "monlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "monlab/analysis.hpp"
#include "monlab/error.hpp"
#include "monlab/format.hpp"
#include "monlab/metrics_csv.hpp"

namespace monlab::report {

using nlohmann::ordered_json;

std::string tool_version() { return MONLAB_VERSION; }

namespace {

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json opt(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json speed_json(const SpeedSummary& s) {
  return {{"throughput_attrs_per_sec", s.throughput_attrs_per_sec},
          {"delay_mean_s", opt(s.delay_mean)},
          {"delay_p50_s", opt(s.delay_p50)},
          {"delay_p95_s", opt(s.delay_p95)},
          {"delay_p99_s", opt(s.delay_p99)},
          {"delay_max_s", opt(s.delay_max)},
          {"ok", s.ok_count},
          {"timeout", s.timeout_count},
          {"error", s.error_count}};
}

ordered_json cost_json(const CostSummary& c) {
  return {{"network_bytes_per_sec", opt(c.network_bytes_per_sec)},
          {"manager_cpu_mean", opt(c.manager_cpu_mean)},
          {"agent_cpu_mean", opt(c.agent_cpu_mean)},
          {"workload_cpu_mean", opt(c.workload_cpu_mean)},
          {"manager_mem_peak_bytes", opt(c.manager_mem_peak)},
          {"agent_mem_peak_bytes", opt(c.agent_mem_peak)},
          {"workload_mem_peak_bytes", opt(c.workload_mem_peak)}};
}

ordered_json quality_json(const QualitySummary& q) {
  return {{"delay_tolerance_s", q.delay_tolerance},
          {"timeliness", q.timeliness},
          {"temporal_error_mean_s", q.temporal_error_mean}};
}

ordered_json parse_json(const std::string& text, const fs::path& path) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

template <typename T>
T json_field(const ordered_json& j, const char* key, const fs::path& path) {
  if (!j.contains(key)) throw InputError(path.string() + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(path.string() + ": bad field '" + key + "'");
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

}  // namespace

std::string fit_json(const FitReport& fit) {
  const auto [a, b] = fit.spec.param_names();
  ordered_json params;
  params[std::string(a)] = fit.spec.first();
  params[std::string(b)] = fit.spec.second();
  return dump({{"family", std::string(to_string(fit.spec.family()))},
               {"params", params},
               {"n", fit.sample_count},
               {"ks", fit.ks_statistic},
               {"pass_0_05", fit.ks_pass_at_0_05}});
}

std::string derived_json(const DerivedReport& report) {
  ordered_json points = ordered_json::array();
  for (const auto& p : report.points)
    points.push_back({{"k", p.factor_value},
                      {"R", p.speed_R},
                      {"C", p.cost_C},
                      {"Q", p.quality_Q},
                      {"G", p.efficiency_G}});
  ordered_json prod = ordered_json::array();
  for (const auto& p : report.productivity)
    prod.push_back({{"k", p.factor_value},
                    {"F", p.functional_F},
                    {"G", p.management_G},
                    {"E", p.productivity_E}});
  ordered_json impact = ordered_json::array();
  for (const auto& i : report.impact)
    impact.push_back({{"k0", i.baseline_k0},
                      {"k", i.factor_k},
                      {"mim", i.mim},
                      {"out_of_range", i.out_of_range}});
  ordered_json scal = ordered_json::array();
  for (const auto& s : report.scalability)
    scal.push_back({{"k1", s.k1}, {"k2", s.k2}, {"psi", s.psi}});
  return dump({{"run_id", report.run_id},
               {"factor_name", report.factor_name},
               {"points", points},
               {"productivity", prod},
               {"impact", impact},
               {"scalability", scal}});
}

std::string simulation_json(const std::string& run_id, const SimPlan& plan,
                            const DistortionSummary& summary) {
  return dump({{"kind", "simulation"},
               {"run_id", run_id},
               {"plan",
                {{"agents", plan.agent_count},
                 {"interval_s", plan.poll_interval},
                 {"duration_s", plan.duration},
                 {"delay", to_string(plan.delay)},
                 {"process", to_string(plan.process)},
                 {"aggregation", std::string(to_string(plan.aggregation))},
                 {"manager_service_s", plan.manager_service},
                 {"warmup_intervals", plan.warmup_intervals},
                 {"seed", plan.seed}}},
               {"summary",
                {{"rmse", summary.rmse},
                 {"mean_abs_rel_error", summary.mean_abs_rel_error},
                 {"max_staleness_s", summary.max_staleness_s}}}});
}

std::string run_json(const bench::RunRecord& record, const std::string& factor_name) {
  const auto& plan = record.plan;
  ordered_json j = {{"kind", "bench"},
                    {"run_id", record.run_id},
                    {"factor_name", factor_name},
                    {"factor_value", bench::factor_value(plan, factor_name)},
                    {"agent_count", plan.agent_count},
                    {"poll_rate", plan.poll_rate},
                    {"attributes_per_poll", plan.attributes_per_poll},
                    {"monitor_rate_attrs_per_sec", plan.poll_rate * plan.attributes_per_poll},
                    {"rounds", record.rounds},
                    {"elapsed_s", record.elapsed},
                    {"achieved_round_rate", record.achieved_round_rate},
                    {"aborted", record.aborted},
                    {"abort_reason", record.abort_reason},
                    {"speed", speed_json(speed_summary(record.monitoring))},
                    {"cost", cost_json(cost_summary(record.monitoring))},
                    {"quality", quality_json(quality_summary(record.monitoring, plan.delay_tolerance))}};
  if (record.workload) {
    j["workload"] = {{"speed", speed_json(speed_summary(*record.workload))},
                     {"cost", cost_json(cost_summary(*record.workload))},
                     {"quality", quality_json(quality_summary(*record.workload,
                                                              plan.workload->task_deadline))}};
  } else {
    j["workload"] = nullptr;
  }
  return dump(j);
}

std::string manifest_json(const Manifest& m) {
  ordered_json j = {{"run_id", m.run_id},
                    {"command", m.command},
                    {"inputs", m.inputs},
                    {"outputs", m.outputs},
                    {"started", m.started},
                    {"finished", m.finished},
                    {"tool_version", tool_version()},
                    {"partial", m.partial}};
  if (!m.error.empty()) j["error"] = m.error;
  return dump(j);
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_trace_csv(std::ostream& out, const DistortionTrace& trace) {
  out << "t,real,observed,error\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    out << format_double(trace.times[i]) << ',' << format_double(trace.real_aggregate[i]) << ','
        << format_double(trace.observed_aggregate[i]) << ','
        << format_double(trace.per_point_error[i]) << '\n';
}

DistortionTrace read_trace_csv(std::istream& in) {
  DistortionTrace trace;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "t,real,observed,error")
    throw InputError("trace: line 1: expected header t,real,observed,error");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    double v[4];
    std::string_view rest(line);
    for (int c = 0; c < 4; ++c) {
      const auto comma = c < 3 ? rest.find(',') : std::string_view::npos;
      if (c < 3 && comma == std::string_view::npos)
        throw InputError("trace: line " + std::to_string(line_no) + ": expected 4 columns");
      const auto parsed = parse_double(trim(rest.substr(0, comma)));
      if (!parsed) throw InputError("trace: line " + std::to_string(line_no) + ": bad number");
      v[c] = *parsed;
      if (c < 3) rest = rest.substr(comma + 1);
    }
    trace.times.push_back(v[0]);
    trace.real_aggregate.push_back(v[1]);
    trace.observed_aggregate.push_back(v[2]);
    trace.per_point_error.push_back(v[3]);
  }
  return trace;
}

std::vector<double> read_delays(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::string_view view(text);
  if (view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
  if (view.substr(0, 7) == "run_id,") {
    std::istringstream csv(text);
    const auto table = read_samples_csv(csv);
    std::vector<double> out;
    for (const auto& s : table.samples)
      if (s.status == SampleStatus::ok && s.delay) out.push_back(*s.delay);
    return out;
  }
  std::vector<double> out;
  std::istringstream lines{std::string(view)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto v = parse_double(t);
    if (!v || !std::isfinite(*v))
      throw InputError("delays: line " + std::to_string(line_no) + ": not a number");
    out.push_back(*v);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<fs::path> save_bench_run(const fs::path& dir, const bench::RunRecord& record,
                                     const std::string& factor_name) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const auto put = [&](const char* name, const std::string& content) {
    write_file(dir / name, content);
    written.push_back(dir / name);
  };
  put("plan.txt", bench::format_plan(record.plan));
  std::ostringstream s;
  write_samples_csv(s, record.run_id, record.monitoring.samples());
  put("samples.csv", s.str());
  std::ostringstream r;
  write_resources_csv(r, record.run_id, record.monitoring.resources());
  put("resources.csv", r.str());
  if (record.workload) {
    std::ostringstream ws;
    write_samples_csv(ws, record.run_id, record.workload->samples());
    put("workload_samples.csv", ws.str());
    std::ostringstream wr;
    write_resources_csv(wr, record.run_id, record.workload->resources());
    put("workload_resources.csv", wr.str());
  }
  put("run.json", run_json(record, factor_name));
  return written;
}

namespace {

MetricSeries load_series(const fs::path& samples_path, const fs::path& resources_path,
                         Qualifier qualifier, const std::string& factor_name, double k,
                         double duration) {
  MetricSeries series(qualifier, factor_name, k, duration);
  std::istringstream s(read_file(samples_path));
  for (auto& sample : read_samples_csv(s).samples) series.record(std::move(sample));
  std::istringstream r(read_file(resources_path));
  for (const auto& res : read_resources_csv(r).resources) series.record(res);
  return series;
}

}  // namespace

LoadedRun load_bench_run(const fs::path& dir, const std::string& factor_name) {
  const auto meta_path = dir / "run.json";
  const auto meta = parse_json(read_file(meta_path), meta_path);
  LoadedRun run;
  run.dir = dir;
  run.run_id = json_field<std::string>(meta, "run_id", meta_path);
  run.aborted = json_field<bool>(meta, "aborted", meta_path);
  const double duration = json_field<double>(meta, "elapsed_s", meta_path);
  std::istringstream plan_text(read_file(dir / "plan.txt"));
  run.plan = bench::parse_plan(plan_text);
  const double k = bench::factor_value(run.plan, factor_name);
  const auto qualifier = run.plan.agent_count == 1 ? Qualifier::one_to_one : Qualifier::one_to_many;
  run.monitoring = load_series(dir / "samples.csv", dir / "resources.csv", qualifier, factor_name,
                               k, duration);
  if (run.plan.workload)
    run.workload = load_series(dir / "workload_samples.csv", dir / "workload_resources.csv",
                               Qualifier::one_to_one, factor_name, k, duration);
  return run;
}

LoadedSimulation load_simulation(const fs::path& dir) {
  const auto meta_path = dir / "summary.json";
  const auto meta = parse_json(read_file(meta_path), meta_path);
  LoadedSimulation sim;
  sim.dir = dir;
  sim.run_id = json_field<std::string>(meta, "run_id", meta_path);
  const auto summary = json_field<ordered_json>(meta, "summary", meta_path);
  sim.summary.rmse = json_field<double>(summary, "rmse", meta_path);
  sim.summary.mean_abs_rel_error = json_field<double>(summary, "mean_abs_rel_error", meta_path);
  sim.summary.max_staleness_s = json_field<double>(summary, "max_staleness_s", meta_path);
  std::istringstream trace(read_file(dir / "trace.csv"));
  sim.trace = read_trace_csv(trace);
  return sim;
}

RunKind detect_run_kind(const fs::path& dir) {
  for (const char* name : {"run.json", "summary.json"}) {
    const auto path = dir / name;
    if (!fs::exists(path)) continue;
    const auto kind = json_field<std::string>(parse_json(read_file(path), path), "kind", path);
    if (kind == "bench") return RunKind::bench;
    if (kind == "simulation") return RunKind::simulation;
    throw InputError(path.string() + ": unknown kind '" + kind + "'");
  }
  throw InputError(dir.string() + ": not a run directory");
}

DerivedReport derive(const std::vector<LoadedRun>& runs, const std::string& factor_name,
                     std::optional<double> baseline_k, const std::string& report_id) {
  if (runs.empty()) throw InputError("derive: no runs");
  std::vector<RunView> views;
  for (const auto& r : runs) {
    RunView v;
    v.run_id = r.run_id;
    v.k = r.monitoring.factor_value();
    v.monitoring = &r.monitoring;
    v.workload = r.workload ? &*r.workload : nullptr;
    v.delay_tolerance = r.plan.delay_tolerance;
    v.task_deadline = r.plan.workload ? r.plan.workload->task_deadline : 1.0;
    views.push_back(std::move(v));
  }
  double k0 = views.front().k;
  for (const auto& v : views) k0 = std::min(k0, v.k);
  return derive_runs(views, baseline_k.value_or(k0), factor_name, report_id);
}

namespace {

std::string dat_header(const std::string& title, const std::string& columns) {
  return "# " + title + "\n# columns: " + columns + "\n";
}

}  // namespace

std::map<std::string, std::string> build_report(const std::vector<LoadedRun>& runs_in,
                                                const std::vector<LoadedSimulation>& sims_in,
                                                const ReportOptions& options) {
  if (runs_in.empty() && sims_in.empty()) throw InputError("report: no inputs");

  std::vector<const LoadedRun*> runs;
  for (const auto& r : runs_in) runs.push_back(&r);
  std::sort(runs.begin(), runs.end(), [](const LoadedRun* a, const LoadedRun* b) {
    const double ka = a->monitoring.factor_value(), kb = b->monitoring.factor_value();
    return ka != kb ? ka < kb : a->run_id < b->run_id;
  });
  std::vector<const LoadedSimulation*> sims;
  for (const auto& s : sims_in) sims.push_back(&s);
  std::sort(sims.begin(), sims.end(),
            [](const LoadedSimulation* a, const LoadedSimulation* b) { return a->run_id < b->run_id; });

  std::ostringstream md;
  md << "# monlab report\n\n";

  std::ostringstream scal, impact, timely, distortion;
  const std::string& factor = options.factor_name;
  if (!runs.empty()) {
    std::vector<LoadedRun> ordered;
    for (const auto* r : runs) ordered.push_back(*r);
    const auto d = derive(ordered, factor, options.baseline_k, "report");
    const double k0 = d.scalability.front().k1;
    scal << dat_header("scalability degree psi = G(k)/G(k0) over " + factor + ", k0 = " + num(k0),
                       "k psi G R C Q");
    for (std::size_t i = 0; i < d.points.size(); ++i) {
      const auto& p = d.points[i];
      scal << num(p.factor_value) << ' ' << num(d.scalability[i].psi) << ' ' << num(p.efficiency_G)
           << ' ' << num(p.speed_R) << ' ' << num(p.cost_C) << ' ' << num(p.quality_Q) << '\n';
    }
    impact << dat_header("management impact mim = 1 - E(k)/E(k0) over " + factor + ", k0 = " + num(k0),
                         "k mim E F G out_of_range");
    for (std::size_t i = 0; i < d.impact.size(); ++i) {
      const auto& m = d.impact[i];
      const auto& p = d.productivity[i];
      impact << num(m.factor_k) << ' ' << num(m.mim) << ' ' << num(p.productivity_E) << ' '
             << num(p.functional_F) << ' ' << num(p.management_G) << ' ' << (m.out_of_range ? 1 : 0)
             << '\n';
    }

    md << "## Runs over " << factor << " (baseline k0 = " << num(k0) << ")\n\n"
       << "| run | k | R | C | Q | G | psi |\n|---|---|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < d.points.size(); ++i) {
      const auto& p = d.points[i];
      md << "| " << runs[i]->run_id << (runs[i]->aborted ? " (partial)" : "") << " | "
         << num(p.factor_value) << " | " << format_fixed(p.speed_R, 3) << " | "
         << format_fixed(p.cost_C, 4) << " | " << format_fixed(p.quality_Q, 4) << " | "
         << format_fixed(p.efficiency_G, 3) << " | " << format_fixed(d.scalability[i].psi, 4)
         << " |\n";
    }
    md << '\n';
    if (!d.impact.empty()) {
      md << "## Management impact\n\n| k | E | mim | out of range |\n|---|---|---|---|\n";
      for (std::size_t i = 0; i < d.impact.size(); ++i)
        md << "| " << num(d.impact[i].factor_k) << " | "
           << format_fixed(d.productivity[i].productivity_E, 4) << " | "
           << format_fixed(d.impact[i].mim, 4) << " | " << (d.impact[i].out_of_range ? "yes" : "no")
           << " |\n";
      md << '\n';
    } else {
      md << "No workload series at the baseline; impact not computed.\n\n";
    }
  } else {
    scal << dat_header("scalability degree psi = G(k)/G(k0) over " + factor, "k psi G R C Q");
    impact << dat_header("management impact mim = 1 - E(k)/E(k0) over " + factor,
                         "k mim E F G out_of_range");
  }

  timely << dat_header("timeliness at the delay tolerance: fitted model prediction vs measured",
                       "k tau predicted measured ks n");
  if (!runs.empty()) {
    md << "## Timeliness\n\n| run | model | tau | predicted | measured |\n|---|---|---|---|---|\n";
    const std::vector<Family> families = {Family::normal, Family::lognormal, Family::weibull};
    for (const auto* r : runs) {
      const auto delays = ok_delays(r->monitoring);
      const double tau = r->plan.delay_tolerance;
      const double measured = quality_summary(r->monitoring, tau).timeliness;
      double predicted = std::nan("");
      double ks = std::nan("");
      std::string model = "none";
      try {
        const auto fit = select_model(delays, families);
        predicted = predict_timeliness(fit.spec, tau);
        ks = fit.ks_statistic;
        model = to_string(DelayModel{fit.spec});
      } catch (const std::exception& e) {
        model = std::string("fit failed: ") + e.what();
      }
      timely << num(r->monitoring.factor_value()) << ' ' << num(tau) << ' ' << num(predicted) << ' '
             << num(measured) << ' ' << num(ks) << ' ' << delays.size() << '\n';
      md << "| " << r->run_id << " | " << model << " | " << num(tau) << " | "
         << (std::isnan(predicted) ? std::string("n/a") : format_fixed(predicted, 4)) << " | "
         << format_fixed(measured, 4) << " |\n";
    }
    md << '\n';
  }

  distortion << dat_header("distortion traces: real vs observed aggregate, one block per run",
                           "t real observed error");
  if (!sims.empty()) {
    md << "## Distortion\n\n| run | points | rmse | mean abs rel error | max staleness (s) |\n"
       << "|---|---|---|---|---|\n";
    bool first = true;
    for (const auto* s : sims) {
      if (!first) distortion << "\n\n";
      first = false;
      const auto& t = s->trace;
      for (std::size_t i = 0; i < t.times.size(); ++i)
        distortion << num(t.times[i]) << ' ' << num(t.real_aggregate[i]) << ' '
                   << num(t.observed_aggregate[i]) << ' ' << num(t.per_point_error[i]) << '\n';
      md << "| " << s->run_id << " | " << t.times.size() << " | " << format_fixed(s->summary.rmse, 6)
         << " | " << format_fixed(s->summary.mean_abs_rel_error, 6) << " | "
         << format_fixed(s->summary.max_staleness_s, 6) << " |\n";
    }
    md << '\n';
  }

  return {{"scalability.dat", scal.str()},
          {"impact.dat", impact.str()},
          {"timeliness.dat", timely.str()},
          {"distortion.dat", distortion.str()},
          {"summary.md", md.str()}};
}

}  // namespace monlab::report
