// Drives the qlst executable (path baked in at build time) through popen.

#include "doctest.h"
#include "json.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QLST_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qlst_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("ser example") {
    const Run r = run("ser --rho-db 10 --bits 1 --alpha 10 --tau-prime 2");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["ser"].get<double>() > 0.0);
    CHECK(j["ser"].get<double>() < 0.75);
    CHECK(j["regime"] == "exact");
  }

  TEST_CASE("analyze prints the fixed point") {
    const Run r = run("analyze --rho-db 10 --alpha 4 --tau 0.07 --bits 2");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["rate"].get<double>() == doctest::Approx(0.93 * 4.0 * j["mutual_info"].get<double>()));
  }

  TEST_CASE("malformed or unknown config exits 1 with the key") {
    const auto bad = scratch("bad.json");
    std::ofstream(bad) << "{\"system\": {\"foo\": 1}}";
    Run r = run("analyze --tau 0.1 --config " + bad.string());
    CHECK(r.status == 1);
    CHECK(r.out.find("/system/foo") != std::string::npos);
    std::ofstream(bad) << "{ not json";
    r = run("analyze --tau 0.1 --config " + bad.string());
    CHECK(r.status == 1);
    CHECK(run("analyze --tau 0.1 --bits zero").status == 1);
    CHECK(run("frobnicate").status == 1);
  }

  TEST_CASE("rate target above 2a exits 3") {
    const Run r = run("optimize --target-rate 2.5 --a 1 --bits 1 --rho-db 0");
    CHECK(r.status == 3);
    CHECK(r.out.find("unreachable_target") != std::string::npos);
  }

  TEST_CASE("explain output round-trips through --config") {
    const auto cfg = scratch("explained.json");
    const Run first = run("analyze --explain --rho-db 3 --bits inf --tau-prime 2.5");
    REQUIRE(first.status == 0);
    std::ofstream(cfg) << first.out;
    const Run second = run("analyze --explain --config " + cfg.string());
    CHECK(second.status == 0);
    CHECK(second.out == first.out);
  }

  TEST_CASE("simulate is reproducible for a fixed seed") {
    const std::string args = "simulate --seed 7 --n-trials 20 --transmitters 16 --threads ";
    const Run a = run(args + "1"), b = run(args + "2");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
  }

  TEST_CASE("preset writes csv and jsonl") {
    const auto dir = scratch("preset_out");
    std::filesystem::remove_all(dir);
    const Run r = run("preset fig9 --alpha-list 1,10 --out " + dir.string());
    CHECK(r.status == 0);
    CHECK(std::filesystem::exists(dir / "fig9.csv"));
    CHECK(std::filesystem::exists(dir / "fig9.jsonl"));
    const std::string csv = slurp(dir / "fig9.csv");
    run("preset fig9 --alpha-list 1,10 --out " + dir.string());
    CHECK(slurp(dir / "fig9.csv") == csv);
    CHECK(run("preset fig99").status == 1);
    CHECK(run("preset --list").out.find("fig11") != std::string::npos);
  }
}
