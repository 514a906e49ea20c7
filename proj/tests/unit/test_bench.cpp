#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "monlab/agent.hpp"
#include "monlab/error.hpp"
#include "monlab/fitting.hpp"
#include "monlab/harness.hpp"
#include "monlab/manager.hpp"
#include "monlab/workload.hpp"

using namespace monlab;
using namespace monlab::bench;

namespace {

// Minimal blocking client for raw protocol checks.
class RawClient {
 public:
  explicit RawClient(std::uint16_t port) : fd_(::socket(AF_INET, SOCK_STREAM, 0)) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
  }
  ~RawClient() { ::close(fd_); }

  std::string ask(const std::string& request) {
    REQUIRE(::send(fd_, request.data(), request.size(), 0) == static_cast<ssize_t>(request.size()));
    std::string line;
    char c;
    while (::recv(fd_, &c, 1, 0) == 1) {
      line.push_back(c);
      if (c == '\n') break;
    }
    return line;
  }

 private:
  int fd_;
};

std::vector<AgentConfig> configs(std::size_t n, std::uint32_t attrs = 2) {
  std::vector<AgentConfig> out;
  for (std::size_t i = 0; i < n; ++i) {
    AgentConfig c;
    c.agent_id = "agent-" + std::to_string(i);
    c.attribute_count = attrs;
    c.seed = i;
    out.push_back(c);
  }
  return out;
}

std::uint16_t free_port() {
  auto fleet = AgentFleet::spawn(configs(1));
  return fleet.endpoints()[0].port;
}

BenchPlan small_plan() {
  BenchPlan p;
  p.agent_count = 3;
  p.poll_rate = 10;
  p.attributes_per_poll = 2;
  p.duration = 1.0;
  p.delay_tolerance = 1.0;
  p.round_timeout = 0.1;
  p.seed = 3;
  return p;
}

}  // namespace

TEST_CASE("constant agent answers the same value") {
  auto fleet = AgentFleet::spawn(configs(1, 3));
  RawClient client(fleet.endpoints()[0].port);
  for (int i = 0; i < 5; ++i) CHECK(client.ask("GET a0,a2\n") == "VAL a0=42.000000,a2=42.000000\n");
  CHECK(client.ask("GET a3\n").rfind("ERR ", 0) == 0);
  CHECK(client.ask("HELLO\n").rfind("ERR ", 0) == 0);
  CHECK(client.ask("GET a0\n") == "VAL a0=42.000000\n");
}

TEST_CASE("value models") {
  CHECK(parse_value_model("constant:7").param == 7.0);
  CHECK(parse_value_model("random_walk:0.5").kind == ValueModel::Kind::random_walk);
  CHECK(parse_value_model("rate_counter:100").kind == ValueModel::Kind::rate_counter);
  CHECK(to_string(parse_value_model("rate_counter:100")) == "rate_counter:100");
  CHECK_THROWS_AS(parse_value_model("random_walk"), InputError);
  CHECK_THROWS_AS(parse_value_model("sine:1"), InputError);

  auto cfg = configs(1);
  cfg[0].value_model = parse_value_model("random_walk:1");
  auto fleet = AgentFleet::spawn(cfg);
  RawClient client(fleet.endpoints()[0].port);
  std::set<std::string> seen;
  for (int i = 0; i < 20; ++i) seen.insert(client.ask("GET a0\n"));
  CHECK(seen.size() > 1);
}

TEST_CASE("fifty agents are reachable within two seconds") {
  const auto start = Clock::now();
  auto fleet = AgentFleet::spawn(configs(50));
  Manager manager(fleet.endpoints(), Clock::now());
  std::vector<MetricSample> round;
  while (Clock::now() - start < std::chrono::seconds(2)) {
    round = manager.poll_round(1, 0.5);
    if (std::all_of(round.begin(), round.end(), [](const auto& s) { return s.status == SampleStatus::ok; }))
      break;
  }
  REQUIRE(round.size() == 50);
  for (const auto& s : round) CHECK(s.status == SampleStatus::ok);
  CHECK(Clock::now() - start < std::chrono::seconds(2));
  for (std::size_t i = 0; i < round.size(); ++i) CHECK(round[i].agent_id == "agent-" + std::to_string(i));
}

TEST_CASE("duplicate port rolls back the whole spawn") {
  auto holder = AgentFleet::spawn(configs(1));
  const auto taken = holder.endpoints()[0].port;
  const auto spare = free_port();
  auto cfg = configs(2);
  cfg[0].listen_port = spare;
  cfg[1].listen_port = taken;
  try {
    AgentFleet::spawn(cfg);
    FAIL("expected SpawnError");
  } catch (const SpawnError& e) {
    CHECK(e.failed_agents == std::vector<std::string>{"agent-1"});
  }
  // The spare port was released by the rollback.
  auto again = configs(1);
  again[0].listen_port = spare;
  CHECK_NOTHROW(AgentFleet::spawn(again));
}

TEST_CASE("injected service delay beyond the timeout times out exactly that agent") {
  auto cfg = configs(3);
  cfg[1].service_delay = ConstantDelay{0.3};
  auto fleet = AgentFleet::spawn(cfg);
  Manager manager(fleet.endpoints(), Clock::now());
  const auto start = Clock::now();
  const auto round = manager.poll_round(1, 0.1);
  const double took = std::chrono::duration<double>(Clock::now() - start).count();
  REQUIRE(round.size() == 3);
  CHECK(round[0].status == SampleStatus::ok);
  CHECK(round[1].status == SampleStatus::timeout);
  CHECK_FALSE(round[1].delay.has_value());
  CHECK(round[2].status == SampleStatus::ok);
  CHECK(took < 0.1 + 0.05);
}

TEST_CASE("zero agents give an empty round") {
  Manager manager({}, Clock::now());
  CHECK(manager.poll_round(1, 0.1).empty());
}

TEST_CASE("refused connection yields an error sample") {
  const auto port = free_port();
  Manager manager({{"ghost", port}}, Clock::now());
  const auto round = manager.poll_round(1, 0.1);
  REQUIRE(round.size() == 1);
  CHECK(round[0].status == SampleStatus::error);
}

TEST_CASE("plan parsing") {
  std::istringstream good(
      "# sweep point\nagent_count = 4\npoll_rate = 2\nattributes_per_poll = 3\nduration_s = 5\n"
      "delay_tolerance_s = 0.5\nround_timeout_s = 0.25\nseed = 9\n\n"
      "workload.task_rate = 20\nworkload.task_size = 1\nworkload.task_deadline_s = 0.01\n"
      "workload.colocated = true\n");
  const auto plan = parse_plan(good);
  CHECK(plan.agent_count == 4);
  CHECK(plan.poll_rate == 2.0);
  CHECK(plan.poll_interval() == 0.5);
  REQUIRE(plan.workload);
  CHECK(plan.workload->colocated);
  CHECK(plan.warnings().empty());
  std::istringstream again(format_plan(plan));
  const auto back = parse_plan(again);
  CHECK(back.agent_count == plan.agent_count);
  CHECK(back.workload->task_deadline == plan.workload->task_deadline);

  const auto error_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_plan(in);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string full =
      "agent_count = 1\npoll_rate = 1\nattributes_per_poll = 1\nduration_s = 1\n"
      "delay_tolerance_s = 1\nround_timeout_s = 1\n";
  CHECK(error_of(full).find("seed") != std::string::npos);
  CHECK(error_of(full + "seed = 1\nworkload.task_rate = 5\n").find("workload.task_size") != std::string::npos);
  CHECK(error_of(full + "seed = 1\nbogus = 2\n").find("bogus") != std::string::npos);
  CHECK(error_of(full + "seed = 1\nseed = 2\n").find("seed") != std::string::npos);
  CHECK(error_of(full + "seed = x\n").find("seed") != std::string::npos);
  CHECK(error_of("agent_count = 0\n" + full.substr(full.find('\n') + 1) + "seed = 1\n").find("agent_count") !=
        std::string::npos);

  BenchPlan slow = small_plan();
  slow.round_timeout = 2.0;
  CHECK(slow.warnings().size() == 1);
}

TEST_CASE("one agent at 10 rounds/s for 10 s gives about 100 samples") {
  BenchPlan p = small_plan();
  p.agent_count = 1;
  p.duration = 10.0;
  const auto rec = run_bench(p);
  CHECK(rec.monitoring.samples().size() >= 99);
  CHECK(rec.monitoring.samples().size() <= 101);
  CHECK(rec.monitoring.qualifier() == Qualifier::one_to_one);
  CHECK(std::fabs(rec.elapsed - p.duration) <= 0.05 * p.duration);
  CHECK(std::fabs(rec.achieved_round_rate - p.poll_rate) <= 0.05 * p.poll_rate);
  CHECK_FALSE(rec.aborted);
  CHECK_FALSE(rec.workload.has_value());
  CHECK_FALSE(rec.monitoring.resources().empty());
}

TEST_CASE("every issued poll yields one sample; constant delay stays timely") {
  BenchPlan p = small_plan();
  p.agent_count = 50;
  p.duration = 2.0;
  p.service_delay = ConstantDelay{0.005};
  const auto rec = run_bench(p);
  CHECK(rec.monitoring.samples().size() == rec.rounds * 50);
  CHECK(rec.monitoring.qualifier() == Qualifier::one_to_many);
  CHECK_NOTHROW(rec.monitoring.validate());
  CHECK(quality_summary(rec.monitoring, 1.0).timeliness == 1.0);
  for (const auto& s : rec.monitoring.samples()) CHECK(*s.delay >= 0.005);
}

TEST_CASE("spawn failure aborts the run") {
  auto holder = AgentFleet::spawn(configs(1));
  BenchOptions options;
  options.port_base = holder.endpoints()[0].port;
  CHECK_THROWS_AS(run_bench(small_plan(), options), RunAborted);
  options.port_base = 65534;
  CHECK_THROWS_AS(run_bench(small_plan(), options), RunAborted);
}

TEST_CASE("manager overload aborts with partial data") {
  BenchPlan p = small_plan();
  p.agent_count = 2;
  p.poll_rate = 100;
  p.round_timeout = 0.5;
  p.duration = 5.0;
  p.service_delay = ConstantDelay{0.2};
  const auto rec = run_bench(p);
  CHECK(rec.aborted);
  CHECK(rec.abort_reason.find("backlog") != std::string::npos);
  CHECK(rec.rounds > 0);
  CHECK(rec.monitoring.samples().size() == rec.rounds * 2);
  CHECK(rec.elapsed < p.duration);
}

TEST_CASE("workload series") {
  BenchPlan p = small_plan();
  p.duration = 2.0;
  p.workload = WorkloadConfig{50, 1, 0.05, false};
  const auto rec = run_bench(p);
  REQUIRE(rec.workload);
  const auto tasks = rec.workload->samples();
  CHECK(tasks.size() == 100);
  CHECK(std::all_of(tasks.begin(), tasks.end(), [](const auto& s) { return s.activity == Activity::task; }));
  CHECK(quality_summary(*rec.workload, 0.05).timeliness > 0.9);
  CHECK(cost_summary(*rec.workload).workload_cpu_mean.has_value());
  CHECK_FALSE(cost_summary(rec.monitoring).workload_cpu_mean.has_value());
}

TEST_CASE("isolated workload latency is unaffected by the monitor rate") {
  // Alternating one-second blocks spread slow host drift evenly over both
  // rates; a same-rate control is reported alongside.
  const auto block = [](double rate, std::vector<double>& into) {
    BenchPlan p = small_plan();
    p.agent_count = 5;
    p.poll_rate = rate;
    p.round_timeout = 0.04;
    p.duration = 1.0;
    p.workload = WorkloadConfig{50, 0.5, 0.05, false};
    const auto rec = run_bench(p);
    for (const auto& s : rec.workload->samples())
      if (s.delay) into.push_back(*s.delay);
  };
  run_work_units(0.1);
  std::vector<double> low, high, control;
  for (int i = 0; i < 6; ++i) {
    block(1.0, low);
    block(20.0, high);
    block(1.0, control);
  }
  const double critical = ks_two_sample_critical(low.size(), high.size(), 0.01);
  MESSAGE("D(1/s, 20/s) = " << ks_two_sample(low, high) << ", same-rate control D = "
                            << ks_two_sample(low, control) << ", critical = " << critical);
  CHECK(ks_two_sample(low, high) <= critical);
}

TEST_CASE("impact experiment") {
  BenchPlan p = small_plan();
  p.agent_count = 2;
  p.duration = 1.5;
  p.service_delay = ConstantDelay{0.002};
  p.workload = WorkloadConfig{50, 1, 0.003, true};
  const std::vector<double> rates = {2, 50};
  const auto points = impact_experiment(p, rates);
  REQUIRE(points.size() == 2);
  CHECK(points[0].valid);
  CHECK(points[0].E_k == points[0].E_baseline);
  CHECK(points[0].record.has_value());
  CHECK(points[1].rate == 50.0);

  BenchPlan no_work = small_plan();
  CHECK_THROWS_AS(impact_experiment(no_work, rates), InputError);
}
