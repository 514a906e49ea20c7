#include "monlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <ctime>
#include <istream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "monlab/analysis.hpp"
#include "monlab/error.hpp"
#include "monlab/format.hpp"
#include "monlab/manager.hpp"

namespace monlab::bench {

void BenchPlan::validate() const {
  if (agent_count < 1) throw InputError("agent_count must be >= 1");
  if (!(poll_rate > 0.0)) throw InputError("poll_rate must be > 0");
  if (attributes_per_poll < 1) throw InputError("attributes_per_poll must be >= 1");
  if (!(duration > 0.0)) throw InputError("duration_s must be > 0");
  if (!(delay_tolerance > 0.0)) throw InputError("delay_tolerance_s must be > 0");
  if (!(round_timeout > 0.0)) throw InputError("round_timeout_s must be > 0");
  if (workload) workload->validate();
}

std::vector<std::string> BenchPlan::warnings() const {
  std::vector<std::string> out;
  if (round_timeout > poll_interval())
    out.push_back("round_timeout_s " + format_double(round_timeout) +
                  " exceeds the poll interval " + format_double(poll_interval()) +
                  "; rounds may back up");
  return out;
}

namespace {

const std::set<std::string> kRequiredKeys = {"agent_count",       "poll_rate",       "attributes_per_poll",
                                             "duration_s",        "delay_tolerance_s", "round_timeout_s",
                                             "seed"};
const std::set<std::string> kWorkloadKeys = {"workload.task_rate", "workload.task_size",
                                             "workload.task_deadline_s", "workload.colocated"};
const std::set<std::string> kOptionalKeys = {"agent.value_model", "agent.service_delay"};

double plan_number(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto v = parse_double(kv.at(key));
  if (!v || !std::isfinite(*v)) throw InputError("plan key '" + key + "': not a number");
  return *v;
}

std::uint64_t plan_count(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto v = parse_integer(kv.at(key));
  if (!v || *v < 0) throw InputError("plan key '" + key + "': not a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

bool plan_bool(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto& v = kv.at(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("plan key '" + key + "': expected true or false");
}

void require_keys(const std::map<std::string, std::string>& kv, const std::set<std::string>& keys) {
  std::string missing;
  for (const auto& key : keys)
    if (!kv.count(key)) missing += (missing.empty() ? "'" : ", '") + key + "'";
  if (!missing.empty()) throw InputError("plan: missing key " + missing);
}

}  // namespace

BenchPlan parse_plan(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InputError("plan line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!kRequiredKeys.count(key) && !kWorkloadKeys.count(key) && !kOptionalKeys.count(key))
      throw InputError("plan: unknown key '" + key + "'");
    if (!kv.emplace(key, value).second) throw InputError("plan: duplicate key '" + key + "'");
  }
  require_keys(kv, kRequiredKeys);

  BenchPlan plan;
  plan.agent_count = plan_count(kv, "agent_count");
  plan.poll_rate = plan_number(kv, "poll_rate");
  plan.attributes_per_poll = static_cast<std::uint32_t>(plan_count(kv, "attributes_per_poll"));
  plan.duration = plan_number(kv, "duration_s");
  plan.delay_tolerance = plan_number(kv, "delay_tolerance_s");
  plan.round_timeout = plan_number(kv, "round_timeout_s");
  plan.seed = plan_count(kv, "seed");

  const bool any_workload = std::any_of(kWorkloadKeys.begin(), kWorkloadKeys.end(),
                                        [&](const std::string& k) { return kv.count(k) > 0; });
  if (any_workload) {
    require_keys(kv, kWorkloadKeys);
    WorkloadConfig w;
    w.task_rate = plan_number(kv, "workload.task_rate");
    w.task_size = plan_number(kv, "workload.task_size");
    w.task_deadline = plan_number(kv, "workload.task_deadline_s");
    w.colocated = plan_bool(kv, "workload.colocated");
    plan.workload = w;
  }
  if (kv.count("agent.value_model")) plan.value_model = parse_value_model(kv.at("agent.value_model"));
  if (kv.count("agent.service_delay"))
    plan.service_delay = parse_delay_model(kv.at("agent.service_delay"));
  plan.validate();
  return plan;
}

std::string format_plan(const BenchPlan& plan) {
  std::ostringstream out;
  out << "agent_count = " << plan.agent_count << '\n'
      << "poll_rate = " << format_double(plan.poll_rate) << '\n'
      << "attributes_per_poll = " << plan.attributes_per_poll << '\n'
      << "duration_s = " << format_double(plan.duration) << '\n'
      << "delay_tolerance_s = " << format_double(plan.delay_tolerance) << '\n'
      << "round_timeout_s = " << format_double(plan.round_timeout) << '\n'
      << "seed = " << plan.seed << '\n';
  if (plan.workload) {
    out << "workload.task_rate = " << format_double(plan.workload->task_rate) << '\n'
        << "workload.task_size = " << format_double(plan.workload->task_size) << '\n'
        << "workload.task_deadline_s = " << format_double(plan.workload->task_deadline) << '\n'
        << "workload.colocated = " << (plan.workload->colocated ? "true" : "false") << '\n';
  }
  out << "agent.value_model = " << to_string(plan.value_model) << '\n';
  if (plan.service_delay) out << "agent.service_delay = " << to_string(*plan.service_delay) << '\n';
  return out.str();
}

std::string default_run_id(const BenchPlan& plan) {
  return "bench-a" + std::to_string(plan.agent_count) + "-r" + format_double(plan.poll_rate) +
         "-s" + std::to_string(plan.seed);
}

double factor_value(const BenchPlan& plan, const std::string& factor_name) {
  if (factor_name == "agent_count") return static_cast<double>(plan.agent_count);
  if (factor_name == "poll_rate") return plan.poll_rate;
  if (factor_name == "attributes_per_poll") return plan.attributes_per_poll;
  if (factor_name == "monitor_rate") return plan.poll_rate * plan.attributes_per_poll;
  throw InputError("unknown factor '" + factor_name + "'");
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Clock::duration seconds(double s) {
  return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(s));
}

// Runs an isolated workload on its own thread until stopped.
class WorkloadThread {
 public:
  explicit WorkloadThread(Workload& w) : workload_(w), thread_([this] { loop(); }) {}
  ~WorkloadThread() { stop(); }

  void stop() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
  }

 private:
  void loop() {
    std::unique_lock lock(mutex_);
    while (!stopping_) {
      lock.unlock();
      auto next = workload_.run_due();
      lock.lock();
      const auto cap = Clock::now() + std::chrono::milliseconds(100);
      cv_.wait_until(lock, std::min(next, cap), [this] { return stopping_; });
    }
  }

  Workload& workload_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace

RunRecord run_bench(const BenchPlan& plan, const BenchOptions& options) {
  plan.validate();
  ResourceLedger ledger;
  std::optional<Workload> workload;
  if (plan.workload) workload.emplace(*plan.workload, plan.duration, &ledger);
  const bool colocated = workload && plan.workload->colocated;

  std::vector<AgentConfig> configs;
  configs.reserve(plan.agent_count);
  for (std::size_t i = 0; i < plan.agent_count; ++i) {
    AgentConfig c;
    c.agent_id = "agent-" + std::to_string(i);
    if (options.port_base != 0) {
      const auto port = static_cast<std::size_t>(options.port_base) + i;
      if (port > 65535) throw RunAborted("port range exceeds 65535");
      c.listen_port = static_cast<std::uint16_t>(port);
    }
    c.attribute_count = plan.attributes_per_poll;
    c.value_model = plan.value_model;
    c.service_delay = plan.service_delay;
    c.colocated_workload = colocated && i == 0;
    c.seed = derive_seed(plan.seed, i);
    configs.push_back(std::move(c));
  }

  std::optional<AgentFleet> fleet;
  try {
    fleet.emplace(AgentFleet::spawn(configs, {&ledger, colocated ? &*workload : nullptr}));
  } catch (const SpawnError& e) {
    throw RunAborted(e.what());
  }

  RunRecord record;
  record.run_id = options.run_id.empty() ? default_run_id(plan) : options.run_id;
  record.plan = plan;

  // Leave a short lead so connection setup does not eat into the first round.
  const auto epoch = Clock::now() + std::chrono::milliseconds(50);
  Manager manager(fleet->endpoints(), epoch, &ledger);

  std::vector<Entity> entities = {Entity::manager, Entity::agent};
  if (workload) entities.push_back(Entity::workload);
  std::this_thread::sleep_until(epoch);
  record.started_at = utc_now();
  ResourceSampler sampler(ledger, epoch, options.resource_interval, entities);
  if (workload) workload->start(epoch);
  std::optional<WorkloadThread> workload_thread;
  if (workload && !colocated) workload_thread.emplace(*workload);

  const double interval = plan.poll_interval();
  const auto planned = static_cast<std::size_t>(std::ceil(plan.duration * plan.poll_rate - 1e-9));
  std::vector<MetricSample> samples;
  samples.reserve(planned * plan.agent_count);
  for (std::size_t i = 0; i < planned; ++i) {
    const auto scheduled = epoch + seconds(static_cast<double>(i) * interval);
    const auto now = Clock::now();
    if (now < scheduled) {
      std::this_thread::sleep_until(scheduled);
    } else {
      const double lag = std::chrono::duration<double>(now - scheduled).count();
      if (lag > static_cast<double>(options.max_backlog_rounds) * interval) {
        record.aborted = true;
        record.abort_reason = "manager overload: round backlog " +
                              format_fixed(lag / interval, 1) + " rounds exceeds " +
                              std::to_string(options.max_backlog_rounds);
        break;
      }
    }
    auto round = manager.poll_round(plan.attributes_per_poll, plan.round_timeout);
    std::move(round.begin(), round.end(), std::back_inserter(samples));
    ++record.rounds;
  }
  if (!record.aborted) std::this_thread::sleep_until(epoch + seconds(plan.duration));
  const auto finished = Clock::now();
  record.finished_at = utc_now();
  record.elapsed = std::chrono::duration<double>(finished - epoch).count();
  record.achieved_round_rate = static_cast<double>(record.rounds) / record.elapsed;

  auto resources = sampler.stop();
  if (workload_thread) workload_thread->stop();
  fleet->stop();
  if (workload) workload->finish();

  const double k = factor_value(plan, options.factor_name);
  record.monitoring = MetricSeries(plan.agent_count == 1 ? Qualifier::one_to_one : Qualifier::one_to_many,
                                   options.factor_name, k, record.elapsed);
  for (auto& s : samples) record.monitoring.record(std::move(s));
  if (workload) record.workload = MetricSeries(Qualifier::one_to_one, options.factor_name, k, record.elapsed);
  for (const auto& r : resources) {
    if (r.entity == Entity::workload)
      record.workload->record(r);
    else
      record.monitoring.record(r);
  }
  if (workload)
    for (auto& s : workload->take_samples()) record.workload->record(std::move(s));
  return record;
}

std::vector<ImpactPoint> impact_experiment(const BenchPlan& plan_with_workload,
                                           std::span<const double> monitor_rates,
                                           const BenchOptions& options) {
  if (!plan_with_workload.workload) throw InputError("impact experiment needs a workload");
  if (monitor_rates.empty()) throw InputError("impact experiment needs monitor rates");
  const auto base_it = std::min_element(monitor_rates.begin(), monitor_rates.end());
  const auto base_index = static_cast<std::size_t>(base_it - monitor_rates.begin());

  std::vector<std::optional<RunRecord>> runs(monitor_rates.size());
  std::vector<ImpactPoint> points(monitor_rates.size());
  const std::string prefix = options.run_id.empty() ? "impact-s" + std::to_string(plan_with_workload.seed)
                                                    : options.run_id;
  for (std::size_t i = 0; i < monitor_rates.size(); ++i) {
    BenchPlan plan = plan_with_workload;
    plan.poll_rate = monitor_rates[i];
    plan.round_timeout = std::min(plan.round_timeout, plan.poll_interval());
    BenchOptions opts = options;
    opts.factor_name = "poll_rate";
    opts.run_id = prefix + "-" + std::to_string(i) + "-r" + format_double(monitor_rates[i]);
    points[i].rate = monitor_rates[i];
    points[i].run_id = opts.run_id;
    try {
      runs[i] = run_bench(plan, opts);
      if (runs[i]->aborted) {
        points[i].valid = false;
        points[i].invalid_reason = runs[i]->abort_reason;
      }
    } catch (const RunAborted& e) {
      points[i].valid = false;
      points[i].invalid_reason = e.what();
    }
  }
  if (!points[base_index].valid)
    throw RunAborted("impact baseline run invalid: " + points[base_index].invalid_reason);

  const auto& base = *runs[base_index];
  const auto keep_records = [&] {
    for (std::size_t i = 0; i < points.size(); ++i) points[i].record = std::move(runs[i]);
  };
  const double tolerance = plan_with_workload.delay_tolerance;
  const double deadline = plan_with_workload.workload->task_deadline;
  const auto G0 = series_efficiency(base.monitoring, base.monitoring, tolerance, CostWeights::monitoring());
  const auto F0 = functional_efficiency(*base.workload, *base.workload, deadline);
  const double E0 = productivity(F0.efficiency_G, G0.efficiency_G).productivity_E;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& p = points[i];
    if (!p.valid) continue;
    try {
      p.monitoring = series_efficiency(runs[i]->monitoring, base.monitoring, tolerance,
                                       CostWeights::monitoring());
      p.functional = functional_efficiency(*runs[i]->workload, *base.workload, deadline);
      p.E_baseline = E0;
      p.E_k = productivity(p.functional.efficiency_G, p.monitoring.efficiency_G).productivity_E;
    } catch (const std::exception& e) {
      p.valid = false;
      p.invalid_reason = e.what();
    }
  }
  keep_records();
  return points;
}

}  // namespace monlab::bench
