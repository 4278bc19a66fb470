#include "qlst/presets.hpp"

#include "doctest.h"

#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

using namespace qlst;

TEST_SUITE("presets") {
  TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 2000; ++i) {
      std::uint64_t u = bits(rng);
      double v;
      std::memcpy(&v, &u, sizeof v);
      if (!std::isfinite(v)) continue;
      const std::string s = format_double(v);
      double back = 0.0;
      std::from_chars(s.data(), s.data() + s.size(), back);
      CHECK(back == v);
    }
  }

  TEST_CASE("CSV quoting and line endings") {
    Dataset d;
    d.columns = {"name", "x", "n"};
    d.rows.push_back({std::string("plain"), 1.5, std::int64_t{3}});
    d.rows.push_back({std::string("a,b"), -0.25, std::int64_t{-1}});
    d.rows.push_back({std::string("say \"hi\""), std::numeric_limits<double>::infinity(), std::int64_t{0}});
    std::ostringstream out;
    write_csv(out, d);
    CHECK(out.str() ==
          "name,x,n\r\n"
          "plain,1.5,3\r\n"
          "\"a,b\",-0.25,-1\r\n"
          "\"say \"\"hi\"\"\",inf,0\r\n");
  }

  TEST_CASE("catalog and unknown ids") {
    CHECK(preset_catalog().size() == 11);
    for (int i = 1; i <= 11; ++i) CHECK(has_preset("fig" + std::to_string(i)));
    CHECK_FALSE(has_preset("fig12"));
    CHECK_THROWS_AS(run_preset("fig12"), std::invalid_argument);
  }

  TEST_CASE("reruns are byte-identical, whatever the thread count") {
    PresetOptions o;
    o.alpha = {1.0, 10.0, 100.0};
    const PresetReport a = run_preset("fig9", o);
    o.threads = 3;
    const PresetReport b = run_preset("fig9", o);
    std::ostringstream ca, cb, ja, jb;
    write_csv(ca, a.data);
    write_csv(cb, b.data);
    write_json_lines(ja, a);
    write_json_lines(jb, b);
    CHECK(ca.str() == cb.str());
    CHECK(ja.str() == jb.str());
    CHECK(a.points > 0);
    CHECK(a.failed_points == 0);
    REQUIRE_FALSE(a.assertions.empty());
    CHECK(a.assertions.back().name.find("point failures") != std::string::npos);
  }
}
