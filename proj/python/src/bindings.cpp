// Python bindings for the metric, distribution, simulation and harness layers.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "monlab/cli.hpp"
#include "monlab/derived.hpp"
#include "monlab/distributions.hpp"
#include "monlab/error.hpp"
#include "monlab/fitting.hpp"
#include "monlab/harness.hpp"
#include "monlab/metrics.hpp"
#include "monlab/simulation.hpp"

namespace py = pybind11;
using namespace monlab;

namespace {

Family family_of(const std::string& name) {
  const auto f = parse_family(name);
  if (!f) throw InputError("unknown family '" + name + "'");
  return *f;
}

DistributionSpec make_spec(const std::string& family, double a, double b) {
  switch (family_of(family)) {
    case Family::normal: return DistributionSpec::normal(a, b);
    case Family::lognormal: return DistributionSpec::lognormal(a, b);
    case Family::weibull: return DistributionSpec::weibull(a, b);
  }
  throw InputError("unknown family");
}

py::dict fit_dict(const FitReport& r) {
  py::dict d;
  const auto [n1, n2] = r.spec.param_names();
  d["family"] = std::string(to_string(r.spec.family()));
  py::dict params;
  params[py::str(std::string(n1))] = r.spec.first();
  params[py::str(std::string(n2))] = r.spec.second();
  d["params"] = params;
  d["n"] = r.sample_count;
  d["ks"] = r.ks_statistic;
  d["pass_0_05"] = r.ks_pass_at_0_05;
  return d;
}

py::dict simulate_dict(std::size_t agents, double interval, double duration, const std::string& delay,
                       const std::string& process, const std::string& aggregation, double manager_service,
                       std::uint64_t seed, std::size_t warmup) {
  SimPlan p;
  p.agent_count = agents;
  p.poll_interval = interval;
  p.duration = duration;
  p.delay = parse_delay_model(delay);
  p.process = parse_value_process(process);
  p.aggregation = parse_aggregation(aggregation);
  p.manager_service = manager_service;
  p.seed = seed;
  p.warmup_intervals = warmup;
  DistortionTrace t;
  {
    py::gil_scoped_release release;
    t = simulate(p);
  }
  py::dict d;
  d["t"] = t.times;
  d["real"] = t.real_aggregate;
  d["observed"] = t.observed_aggregate;
  d["error"] = t.per_point_error;
  d["staleness"] = t.staleness;
  d["rmse"] = t.summary.rmse;
  d["mean_abs_rel_error"] = t.summary.mean_abs_rel_error;
  d["max_staleness_s"] = t.summary.max_staleness_s;
  return d;
}

py::dict bench_dict(const std::string& plan_text) {
  std::istringstream in(plan_text);
  const auto plan = bench::parse_plan(in);
  bench::RunRecord rec;
  {
    py::gil_scoped_release release;
    rec = bench::run_bench(plan);
  }
  const auto speed = speed_summary(rec.monitoring);
  const auto quality = quality_summary(rec.monitoring, plan.delay_tolerance);
  py::dict d;
  d["run_id"] = rec.run_id;
  d["rounds"] = rec.rounds;
  d["elapsed_s"] = rec.elapsed;
  d["achieved_round_rate"] = rec.achieved_round_rate;
  d["aborted"] = rec.aborted;
  d["throughput_attrs_per_sec"] = speed.throughput_attrs_per_sec;
  d["ok_count"] = speed.ok_count;
  d["timeout_count"] = speed.timeout_count;
  d["error_count"] = speed.error_count;
  d["delay_p50"] = speed.delay_p50;
  d["delay_p99"] = speed.delay_p99;
  d["timeliness"] = quality.timeliness;
  d["delays"] = ok_delays(rec.monitoring);
  return d;
}

py::tuple cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_monlab, m) {
  m.doc() = "Monitoring system metrics, delay models and distortion simulation";
  m.attr("__version__") = MONLAB_VERSION;

  py::register_exception<FitError>(m, "FitError", PyExc_ValueError);
  py::register_exception<RunAborted>(m, "RunAborted", PyExc_RuntimeError);

  m.def("efficiency", [](double R, double C, double Q) { return efficiency(R, C, Q).efficiency_G; },
        py::arg("R"), py::arg("C"), py::arg("Q"));
  m.def("productivity", [](double F, double G) { return productivity(F, G).productivity_E; }, py::arg("F"),
        py::arg("G"));
  m.def(
      "management_impact",
      [](double E_baseline, double E_k) {
        const auto r = management_impact(E_baseline, E_k);
        return py::make_tuple(r.mim, r.out_of_range);
      },
      py::arg("E_baseline"), py::arg("E_k"));
  m.def("scalability_degree", [](double G1, double G2) { return scalability_degree(G1, G2).psi; },
        py::arg("G_k1"), py::arg("G_k2"));

  m.def("cdf", [](const std::string& f, double a, double b, double x) { return cdf(make_spec(f, a, b), x); },
        py::arg("family"), py::arg("a"), py::arg("b"), py::arg("x"));
  m.def("quantile",
        [](const std::string& f, double a, double b, double p) { return quantile(make_spec(f, a, b), p); },
        py::arg("family"), py::arg("a"), py::arg("b"), py::arg("p"));
  m.def("sample",
        [](const std::string& f, double a, double b, std::size_t n, std::uint64_t seed) {
          return sample(make_spec(f, a, b), n, seed);
        },
        py::arg("family"), py::arg("a"), py::arg("b"), py::arg("n"), py::arg("seed"));
  m.def("predict_timeliness",
        [](const std::string& f, double a, double b, double tau) {
          return predict_timeliness(make_spec(f, a, b), tau);
        },
        py::arg("family"), py::arg("a"), py::arg("b"), py::arg("tolerance"));
  m.def("fit", [](const std::vector<double>& xs, const std::string& f) { return fit_dict(fit_mle(xs, family_of(f))); },
        py::arg("delays"), py::arg("family"));
  m.def(
      "select_model",
      [](const std::vector<double>& xs, const std::vector<std::string>& names) {
        std::vector<Family> fams;
        for (const auto& n : names) fams.push_back(family_of(n));
        return fit_dict(select_model(xs, fams));
      },
      py::arg("delays"), py::arg("families") = std::vector<std::string>{"normal", "lognormal", "weibull"});

  m.def("simulate", &simulate_dict, py::arg("agents"), py::arg("interval"), py::arg("duration"),
        py::arg("delay") = "weibull:0.7,1", py::arg("process") = "rate:1", py::arg("aggregation") = "sum",
        py::arg("manager_service") = 0.0, py::arg("seed") = 1, py::arg("warmup") = 3);
  m.def("bench", &bench_dict, py::arg("plan"), "Run a bench plan given as plan-file text.");
  m.def("cli", &cli_run, py::arg("args"), "Run the command line tool; returns (exit_code, stdout, stderr).");
}
