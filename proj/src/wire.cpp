#include "monlab/wire.hpp"

#include <cctype>

#include "monlab/error.hpp"
#include "monlab/format.hpp"

namespace monlab::wire {

namespace {

bool valid_decimal(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && text[i] == '-') ++i;
  std::size_t digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++digits;
  if (digits == 0) return false;
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::size_t frac = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++frac;
    if (frac == 0) return false;
  }
  return i == text.size();
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(',', start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

void reject_control(std::string_view line) {
  for (char c : line)
    if (c == '\r' || c == '\n') throw InputError("protocol: stray line terminator");
}

}  // namespace

bool valid_attribute_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_' || c == '.' || c == '-')) return false;
  }
  return true;
}

std::string attribute_id(std::size_t index) { return "a" + std::to_string(index); }

std::string encode_get(const std::vector<std::string>& ids) {
  if (ids.empty()) throw InputError("GET needs at least one attribute");
  std::string out = "GET ";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!valid_attribute_id(ids[i])) throw InputError("invalid attribute id '" + ids[i] + "'");
    if (i) out += ',';
    out += ids[i];
  }
  out += '\n';
  return out;
}

std::string encode_values(const std::vector<std::pair<std::string, double>>& values) {
  if (values.empty()) throw InputError("VAL needs at least one attribute");
  std::string out = "VAL ";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += values[i].first;
    out += '=';
    out += format_fixed(values[i].second, 6);
  }
  out += '\n';
  return out;
}

std::string encode_error(std::string_view message) {
  std::string out = "ERR ";
  for (char c : message) out += (c == '\n' || c == '\r') ? ' ' : c;
  out += '\n';
  return out;
}

GetRequest parse_request(std::string_view line) {
  reject_control(line);
  if (line.substr(0, 4) != "GET ") throw InputError("protocol: expected GET");
  GetRequest req;
  for (auto id : split_commas(line.substr(4))) {
    if (!valid_attribute_id(id)) throw InputError("protocol: bad attribute id");
    req.attribute_ids.emplace_back(id);
  }
  return req;
}

Response parse_response(std::string_view line) {
  reject_control(line);
  if (line.substr(0, 4) == "ERR ") return ErrorResponse{std::string(line.substr(4))};
  if (line.substr(0, 4) != "VAL ") throw InputError("protocol: expected VAL or ERR");
  ValueResponse resp;
  for (auto pair : split_commas(line.substr(4))) {
    const auto eq = pair.find('=');
    if (eq == std::string_view::npos) throw InputError("protocol: missing '='");
    const auto id = pair.substr(0, eq);
    const auto value = pair.substr(eq + 1);
    if (!valid_attribute_id(id) || !valid_decimal(value))
      throw InputError("protocol: bad attribute value pair");
    resp.values.emplace_back(std::string(id), *parse_double(value));
  }
  return resp;
}

}  // namespace monlab::wire
