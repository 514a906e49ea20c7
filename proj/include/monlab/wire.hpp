#pragma once

// Line-oriented manager/agent protocol. ASCII, every message ends with a
// single '\n' (never "\r\n"), one outstanding request per connection.
//
//   request   GET <attr_id>[,<attr_id>]*
//   response  VAL <attr_id>=<decimal>[,<attr_id>=<decimal>]*
//   error     ERR <message>

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace monlab::wire {

struct GetRequest {
  std::vector<std::string> attribute_ids;
};

struct ValueResponse {
  std::vector<std::pair<std::string, double>> values;
};

struct ErrorResponse {
  std::string message;
};

using Response = std::variant<ValueResponse, ErrorResponse>;

// Attribute ids are non-empty runs of [A-Za-z0-9_.-].
bool valid_attribute_id(std::string_view id);

// Canonical attribute id for index i ("a0", "a1", ...).
std::string attribute_id(std::size_t index);

std::string encode_get(const std::vector<std::string>& ids);
// Values are written in fixed notation with six fractional digits.
std::string encode_values(const std::vector<std::pair<std::string, double>>& values);
// Newlines and carriage returns in the message are replaced by spaces.
std::string encode_error(std::string_view message);

// Parsers take one line without its '\n' terminator and throw InputError on
// anything that is not a well-formed message.
GetRequest parse_request(std::string_view line);
Response parse_response(std::string_view line);

}  // namespace monlab::wire
