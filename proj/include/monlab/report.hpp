#pragma once

// Run directories, JSON documents and gnuplot data files.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "monlab/derived.hpp"
#include "monlab/fitting.hpp"
#include "monlab/harness.hpp"
#include "monlab/simulation.hpp"

namespace monlab::report {

namespace fs = std::filesystem;

std::string tool_version();

// JSON documents, pretty-printed with a trailing newline.
std::string fit_json(const FitReport& fit);
std::string derived_json(const DerivedReport& report);
std::string simulation_json(const std::string& run_id, const SimPlan& plan,
                            const DistortionSummary& summary);
std::string run_json(const bench::RunRecord& record, const std::string& factor_name);

struct Manifest {
  std::string run_id;
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string started;
  std::string finished;
  bool partial = false;
  std::string error;  // empty on success
};

std::string manifest_json(const Manifest& manifest);
std::string utc_timestamp();

// Trace CSV with columns t,real,observed,error.
void write_trace_csv(std::ostream& out, const DistortionTrace& trace);
DistortionTrace read_trace_csv(std::istream& in);

/// Plain text delays (one value per line, '#' comments allowed) or a sample
/// CSV, in which case only ok rows with a delay are kept.
std::vector<double> read_delays(std::istream& in);

// Whole-file helpers; reading throws InputError, writing std::runtime_error.
std::string read_file(const fs::path& path);
void write_file(const fs::path& path, const std::string& content);

/// Writes samples, resources, plan and run.json into `dir` and returns the
/// written paths. The manifest is left to the caller.
std::vector<fs::path> save_bench_run(const fs::path& dir, const bench::RunRecord& record,
                                     const std::string& factor_name);

struct LoadedRun {
  fs::path dir;
  std::string run_id;
  bench::BenchPlan plan;
  MetricSeries monitoring;
  std::optional<MetricSeries> workload;
  bool aborted = false;
};

// Rebuilds the series of a saved bench run, tagged with `factor_name`.
LoadedRun load_bench_run(const fs::path& dir, const std::string& factor_name);

struct LoadedSimulation {
  fs::path dir;
  std::string run_id;
  DistortionTrace trace;
  DistortionSummary summary;
};

LoadedSimulation load_simulation(const fs::path& dir);

enum class RunKind { bench, simulation };
// Reads the "kind" field of run.json or summary.json. Throws InputError.
RunKind detect_run_kind(const fs::path& dir);

/// Derived metrics over loaded runs; baseline defaults to the smallest k.
DerivedReport derive(const std::vector<LoadedRun>& runs, const std::string& factor_name,
                     std::optional<double> baseline_k, const std::string& report_id);

struct ReportOptions {
  std::string factor_name = "agent_count";
  std::optional<double> baseline_k;
};

/// Builds every report file (name -> content) from loaded inputs. Output
/// depends only on the inputs: scalability.dat, impact.dat, timeliness.dat,
/// distortion.dat and summary.md.
std::map<std::string, std::string> build_report(const std::vector<LoadedRun>& runs,
                                                const std::vector<LoadedSimulation>& sims,
                                                const ReportOptions& options);

}  // namespace monlab::report
