#include <charconv>
#include <cmath>

#include "config.hpp"
#include "doctest.h"
#include "output.hpp"

using nlohmann::json;
using namespace qpcli;

namespace {

json base_config() {
  return json::parse(R"({
    "potential": {"family": "amo", "lambda": 0.3},
    "frequency": {"golden": true},
    "numerics": {"L": 500, "phases": 4, "energy_grid": {"lo": -2.5, "hi": 2.5, "points": 11}},
    "output": {"dir": "x", "format": "json"}
  })");
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("a valid config parses with defaults") {
  auto cfg = parse_config(base_config());
  CHECK(cfg.potential.family == "amo");
  CHECK(cfg.numerics.L == 500);
  CHECK(cfg.numerics.energies.size() == 11);
  CHECK(cfg.numerics.energies.front() == -2.5);
  CHECK(cfg.numerics.energies.back() == 2.5);
  CHECK(cfg.numerics.k == 6);
  CHECK(cfg.format == Format::json);
  CHECK(cfg.out_dir == "x");
  auto fr = cfg.validated_frequency();
  CHECK(fr.alpha[0] == doctest::Approx((std::sqrt(5.0) - 1) / 2));
  CHECK(cfg.potential_series().l1_norm() == doctest::Approx(0.6));
}

TEST_CASE("missing frequency names the field") {
  auto j = base_config();
  j.erase("frequency");
  CHECK(error_of(j).find("frequency") != std::string::npos);
}

TEST_CASE("config errors") {
  auto unknown = base_config();
  unknown["numerics"]["bogus"] = 1;
  CHECK(error_of(unknown).find("bogus") != std::string::npos);

  auto unsorted = base_config();
  unsorted["numerics"]["energy_grid"] = json::array({0.0, 1.0, 0.5});
  CHECK_FALSE(error_of(unsorted).empty());

  auto neg = base_config();
  neg["numerics"]["resolution"] = -1.0;
  CHECK_FALSE(error_of(neg).empty());

  auto fam = base_config();
  fam["potential"]["family"] = "mystery";
  CHECK_FALSE(error_of(fam).empty());

  auto two = base_config();
  two["kam"] = json::parse(R"({"E": 0.5, "rotation": 0.1})");
  CHECK_FALSE(error_of(two).empty());
}

TEST_CASE("rational frequency is rejected at validation") {
  auto j = base_config();
  j["frequency"] = json::parse(R"({"alpha": [0.5]})");
  auto cfg = parse_config(j);
  CHECK_THROWS_AS(cfg.validated_frequency(), qps::FrequencyRejected);
}

TEST_CASE("digest is stable under key reordering") {
  auto a = json::parse(R"({"b": 1, "a": {"y": [1, 2], "x": 0.5}})");
  auto b = json::parse(R"({"a": {"x": 0.5, "y": [1, 2]}, "b": 1})");
  CHECK(digest(a) == digest(b));
  auto c = json::parse(R"({"a": {"x": 0.5, "y": [2, 1]}, "b": 1})");
  CHECK(digest(a) != digest(c));
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  // FNV-1a of the empty object "{}"
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : std::string("{}")) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  CHECK(digest(json::object()) == h);
}

TEST_CASE("doubles round trip through the text format") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0}) {
    std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(index_string({1}) == "1");
  CHECK(index_string({1, -2}) == "1;-2");
}

}  // TEST_SUITE
