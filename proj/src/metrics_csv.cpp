#include "monlab/metrics_csv.hpp"

#include <istream>
#include <ostream>

#include "monlab/error.hpp"
#include "monlab/format.hpp"

namespace monlab {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void bad_row(std::size_t line_no, const std::string& what) {
  throw InputError("csv line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t parse_count(std::string_view field, std::size_t line_no, const char* name) {
  auto v = parse_integer(field);
  if (!v || *v < 0) bad_row(line_no, std::string("bad ") + name);
  return static_cast<std::uint64_t>(*v);
}

double parse_real(std::string_view field, std::size_t line_no, const char* name) {
  auto v = parse_double(field);
  if (!v) bad_row(line_no, std::string("bad ") + name);
  return *v;
}

void expect_header(std::istream& in, const char* header) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv is empty, header row required");
  // Tolerate a UTF-8 byte order mark written by spreadsheet tools.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (trim(line) != header)
    throw InputError("unexpected csv header '" + line + "', expected '" + header + "'");
}

void take_run_id(std::string& run_id, std::string_view field, std::size_t line_no) {
  if (run_id.empty())
    run_id = field;
  else if (run_id != field)
    bad_row(line_no, "mixed run_id values");
}

}  // namespace

void write_samples_csv(std::ostream& out, const std::string& run_id,
                       std::span<const MetricSample> samples) {
  out << kSampleCsvHeader << '\n';
  for (const auto& s : samples) {
    out << run_id << ',' << format_double(s.timestamp) << ',' << s.agent_id << ','
        << to_string(s.activity) << ',' << s.attribute_count << ','
        << (s.delay ? format_double(*s.delay) : std::string()) << ',' << s.request_bytes
        << ',' << s.response_bytes << ',' << to_string(s.status) << '\n';
  }
}

void write_resources_csv(std::ostream& out, const std::string& run_id,
                         std::span<const ResourceSample> resources) {
  out << kResourceCsvHeader << '\n';
  for (const auto& r : resources) {
    out << run_id << ',' << format_double(r.timestamp) << ',' << to_string(r.entity) << ','
        << format_double(r.cpu_fraction) << ',' << r.memory_bytes << '\n';
  }
}

SampleTable read_samples_csv(std::istream& in) {
  expect_header(in, kSampleCsvHeader);
  SampleTable table;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 9) bad_row(line_no, "expected 9 fields");
    take_run_id(table.run_id, f[0], line_no);
    MetricSample s;
    s.timestamp = parse_real(f[1], line_no, "timestamp_s");
    s.agent_id = f[2];
    auto activity = parse_activity(f[3]);
    if (!activity) bad_row(line_no, "bad activity");
    s.activity = *activity;
    s.attribute_count = static_cast<std::uint32_t>(parse_count(f[4], line_no, "attr_count"));
    if (!f[5].empty()) s.delay = parse_real(f[5], line_no, "delay_s");
    s.request_bytes = parse_count(f[6], line_no, "req_bytes");
    s.response_bytes = parse_count(f[7], line_no, "resp_bytes");
    auto status = parse_status(f[8]);
    if (!status) bad_row(line_no, "bad status");
    s.status = *status;
    try {
      validate(s);
    } catch (const InputError& e) {
      bad_row(line_no, e.what());
    }
    table.samples.push_back(std::move(s));
  }
  return table;
}

ResourceTable read_resources_csv(std::istream& in) {
  expect_header(in, kResourceCsvHeader);
  ResourceTable table;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 5) bad_row(line_no, "expected 5 fields");
    take_run_id(table.run_id, f[0], line_no);
    ResourceSample r;
    r.timestamp = parse_real(f[1], line_no, "timestamp_s");
    auto entity = parse_entity(f[2]);
    if (!entity) bad_row(line_no, "bad entity");
    r.entity = *entity;
    r.cpu_fraction = parse_real(f[3], line_no, "cpu_fraction");
    r.memory_bytes = parse_count(f[4], line_no, "mem_bytes");
    try {
      validate(r);
    } catch (const InputError& e) {
      bad_row(line_no, e.what());
    }
    table.resources.push_back(r);
  }
  return table;
}

}  // namespace monlab
