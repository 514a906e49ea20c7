#include <doctest.h>

#include "monlab/error.hpp"
#include "monlab/format.hpp"
#include "monlab/wire.hpp"

using namespace monlab;

TEST_CASE("encoding is bit exact") {
  CHECK(wire::encode_get({"a0"}) == "GET a0\n");
  CHECK(wire::encode_get({"a0", "a1", "cpu.load"}) == "GET a0,a1,cpu.load\n");
  CHECK(wire::encode_values({{"a0", 42.0}}) == "VAL a0=42.000000\n");
  CHECK(wire::encode_values({{"a0", -1.5}, {"a1", 0.0000004}}) == "VAL a0=-1.500000,a1=0.000000\n");
  CHECK(wire::encode_error("unknown attribute") == "ERR unknown attribute\n");
  CHECK(wire::encode_error("two\r\nlines") == "ERR two  lines\n");
  CHECK(wire::attribute_id(0) == "a0");
  CHECK(wire::attribute_id(17) == "a17");
  CHECK_THROWS_AS(wire::encode_get({}), InputError);
  CHECK_THROWS_AS(wire::encode_get({"bad id"}), InputError);
}

TEST_CASE("parsing") {
  const auto req = wire::parse_request("GET a0,a1");
  CHECK(req.attribute_ids == std::vector<std::string>{"a0", "a1"});
  CHECK_THROWS_AS(wire::parse_request("GET "), InputError);
  CHECK_THROWS_AS(wire::parse_request("GET a0,"), InputError);
  CHECK_THROWS_AS(wire::parse_request("GET a0\r"), InputError);
  CHECK_THROWS_AS(wire::parse_request("get a0"), InputError);
  CHECK_THROWS_AS(wire::parse_request("GET a0 a1"), InputError);

  const auto val = wire::parse_response("VAL a0=42.000000,a1=-3.25");
  const auto& v = std::get<wire::ValueResponse>(val).values;
  REQUIRE(v.size() == 2);
  CHECK(v[0].first == "a0");
  CHECK(v[0].second == 42.0);
  CHECK(v[1].second == -3.25);
  CHECK(std::get<wire::ErrorResponse>(wire::parse_response("ERR nope")).message == "nope");
  CHECK_THROWS_AS(wire::parse_response("VAL a0=abc"), InputError);
  CHECK_THROWS_AS(wire::parse_response("VAL a0=1e5"), InputError);
  CHECK_THROWS_AS(wire::parse_response("VAL a0"), InputError);
  CHECK_THROWS_AS(wire::parse_response("OK"), InputError);
  CHECK_THROWS_AS(wire::parse_response("VAL a0=1\n"), InputError);
}

TEST_CASE("round trip") {
  const std::vector<std::pair<std::string, double>> values = {{"a0", 1.25}, {"x_y.z-1", 123456.5}};
  auto line = wire::encode_values(values);
  line.pop_back();
  const auto back = std::get<wire::ValueResponse>(wire::parse_response(line)).values;
  CHECK(back == values);
}

TEST_CASE("number formatting and parsing") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-7) == "1e-07");
  CHECK(format_double(2.0) == "2");
  CHECK(format_fixed(1.23456789, 3) == "1.235");
  CHECK(*parse_double("+1.5") == 1.5);
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK(*parse_integer("42") == 42);
  CHECK_FALSE(parse_integer("4.2").has_value());
  CHECK(trim("  a b \t") == "a b");
}
