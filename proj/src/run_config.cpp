#include "qlst/run_config.hpp"

#include "qlst/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace qlst {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& pointer, const std::string& message) {
  throw ConfigError(pointer + ": " + message, pointer);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "/" : path, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || item.key() == a;
    if (!known) fail(path + "/" + item.key(), "unknown key");
  }
}

// Each reader leaves `out` alone when the key is absent.

void read(const json& obj, const std::string& path, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "/" + key, "expected a number");
  out = v.get<double>();
}

/// A number or the string "inf".
void read_extended(const json& obj, const std::string& path, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (v.is_string() && v.get<std::string>() == "inf") {
    out = kInf;
    return;
  }
  if (!v.is_number()) fail(path + "/" + key, "expected a number or \"inf\"");
  out = v.get<double>();
}

void read(const json& obj, const std::string& path, const char* key, std::optional<double>& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (v.is_null()) {
    out.reset();
    return;
  }
  if (!v.is_number()) fail(path + "/" + key, "expected a number or null");
  out = v.get<double>();
}

void read(const json& obj, const std::string& path, const char* key, int& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < std::numeric_limits<int>::min() ||
      v.get<long long>() > std::numeric_limits<int>::max())
    fail(path + "/" + key, "expected an integer");
  out = v.get<int>();
}

void read(const json& obj, const std::string& path, const char* key, std::uint64_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) fail(path + "/" + key, "expected a nonnegative integer");
  out = v.get<std::uint64_t>();
}

void read(const json& obj, const std::string& path, const char* key, bool& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "/" + key, "expected true or false");
  out = v.get<bool>();
}

void read(const json& obj, const std::string& path, const char* key, Resolution& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  try {
    if (v.is_string()) {
      out = Resolution::parse(v.get<std::string>());
      return;
    }
    if (v.is_number_integer()) {
      out = Resolution::finite(v.get<int>());
      return;
    }
  } catch (const std::exception& e) {
    fail(path + "/" + key, e.what());
  }
  fail(path + "/" + key, "expected a positive integer or \"inf\"");
}

json extended(double v) { return std::isinf(v) && v > 0 ? json("inf") : json(v); }
json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json resolution(Resolution r) { return r.is_infinite() ? json("inf") : json(r.bits()); }

}  // namespace

double RunConfig::rho() const { return std::isinf(rho_db) ? kInf : std::pow(10.0, rho_db / 10.0); }

void RunConfig::sync_quadrature() {
  numerics.quadrature.base_step = 2.0 * numerics.quadrature.z_max * numerics.quadrature.points / quadrature_nodes;
  numerics.awgn.quadrature = numerics.quadrature;
}

SystemConfig RunConfig::system() const {
  SystemConfig c;
  c.rho = rho();
  c.sigma2 = sigma2;
  c.alpha = alpha;
  c.beta = beta;
  c.tau = tau;
  c.tau_prime = tau_prime;
  c.adc = adc;
  c.dac = dac;
  c.step = step;
  return c;
}

TrialConfig RunConfig::trial() const {
  TrialConfig t;
  t.transmitters = transmitters;
  t.alpha = sim_alpha;
  t.tau_prime = sim_tau_prime;
  t.rho = rho();
  t.adc = adc;
  t.dac = dac;
  t.step = step;
  t.gamp = gamp;
  t.empirical_mse = empirical_mse;
  return t;
}

void validate_run_config(const RunConfig& c) {
  if (!(c.rho_db > -200.0)) fail("/system/rho_db", "must be a number above -200 dB or \"inf\"");
  if (!(c.sigma2 > 0.0) || !std::isfinite(c.sigma2)) fail("/system/sigma2", "must be positive and finite");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) fail("/system/alpha", "must be positive and finite");
  if (!(c.beta > 0.0) || !std::isfinite(c.beta)) fail("/system/beta", "must be positive and finite");
  if (c.tau && !(*c.tau > 0.0 && *c.tau < 1.0)) fail("/system/tau", "must lie in (0, 1)");
  if (c.tau_prime && !(*c.tau_prime > 0.0 && std::isfinite(*c.tau_prime)))
    fail("/system/tau_prime", "must be positive and finite");
  if (c.tau && c.tau_prime) fail("/system/tau_prime", "give tau or tau_prime, not both");
  if (!c.dac.is_infinite() && c.dac.bits() > kMaxDiscreteBits)
    fail("/system/dac_bits", "at most " + std::to_string(kMaxDiscreteBits) + " bits");
  if (c.step && !(*c.step > 0.0 && std::isfinite(*c.step))) fail("/system/step", "must be positive and finite");
  if (c.mse_g && !(*c.mse_g >= 0.0 && *c.mse_g <= 1.0)) fail("/system/mse_g", "must lie in [0, 1]");
  if (c.target_rate && !(*c.target_rate > 0.0 && std::isfinite(*c.target_rate)))
    fail("/targets/rate", "must be positive and finite");
  if (c.target_ser && !(*c.target_ser > 0.0 && *c.target_ser < 0.75)) fail("/targets/ser", "must lie in (0, 0.75)");
  if (c.transmitters < 1) fail("/simulation/transmitters", "must be at least 1");
  if (!(c.sim_alpha > 0.0) || !std::isfinite(c.sim_alpha)) fail("/simulation/alpha", "must be positive and finite");
  if (!(c.sim_tau_prime > 0.0) || !std::isfinite(c.sim_tau_prime))
    fail("/simulation/tau_prime", "must be positive and finite");
  if (c.n_trials < 1) fail("/simulation/n_trials", "must be at least 1");
  const SolverOptions& s = c.numerics.solver;
  if (!(s.damping > 0.0 && s.damping <= 1.0)) fail("/solver/damping", "must lie in (0, 1]");
  if (!(s.tolerance > 0.0)) fail("/solver/tolerance", "must be positive");
  if (s.max_iterations < 1) fail("/solver/max_iterations", "must be at least 1");
  if (!(s.start_offset > 0.0 && s.start_offset < 0.5)) fail("/solver/start_offset", "must lie in (0, 0.5)");
  if (!(s.multistable_gap > 0.0)) fail("/solver/multistable_gap", "must be positive");
  if (c.quadrature_nodes < 2) fail("/quadrature/nodes", "must be at least 2");
  if (!(c.numerics.quadrature.z_max > 0.0)) fail("/quadrature/z_max", "must be positive");
  const int p = c.numerics.quadrature.points;
  if (p != 8 && p != 10 && p != 16 && p != 20) fail("/quadrature/points_per_segment", "must be 8, 10, 16 or 20");
  if (c.optimizer.grid_points < 3) fail("/optimizer/grid_points", "must be at least 3");
  if (!(c.optimizer.tau_min > 0.0 && c.optimizer.tau_min < 1.0)) fail("/optimizer/tau_min", "must lie in (0, 1)");
  if (!(c.optimizer.tau_tolerance > 0.0)) fail("/optimizer/tau_tolerance", "must be positive");
  if (!(c.gamp.damping > 0.0 && c.gamp.damping <= 1.0)) fail("/gamp/damping", "must lie in (0, 1]");
  if (c.gamp.max_iterations < 1) fail("/gamp/max_iterations", "must be at least 1");
  if (!(c.gamp.tolerance > 0.0)) fail("/gamp/tolerance", "must be positive");
  if (!(c.gamp.variance_floor > 0.0)) fail("/gamp/variance_floor", "must be positive");
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), "");
  }
  RunConfig c;
  check_keys(doc, "", {"system", "targets", "simulation", "solver", "quadrature", "optimizer", "gamp"});
  if (doc.contains("system")) {
    const json& s = doc["system"];
    const std::string p = "/system";
    check_keys(s, p, {"rho_db", "sigma2", "alpha", "beta", "tau", "tau_prime", "adc_bits", "dac_bits", "step", "mse_g"});
    read_extended(s, p, "rho_db", c.rho_db);
    read(s, p, "sigma2", c.sigma2);
    read(s, p, "alpha", c.alpha);
    read(s, p, "beta", c.beta);
    read(s, p, "tau", c.tau);
    read(s, p, "tau_prime", c.tau_prime);
    read(s, p, "adc_bits", c.adc);
    read(s, p, "dac_bits", c.dac);
    read(s, p, "step", c.step);
    read(s, p, "mse_g", c.mse_g);
  }
  if (doc.contains("targets")) {
    const json& s = doc["targets"];
    check_keys(s, "/targets", {"rate", "ser"});
    read(s, "/targets", "rate", c.target_rate);
    read(s, "/targets", "ser", c.target_ser);
  }
  if (doc.contains("simulation")) {
    const json& s = doc["simulation"];
    const std::string p = "/simulation";
    check_keys(s, p, {"transmitters", "alpha", "tau_prime", "n_trials", "seed", "empirical_mse"});
    read(s, p, "transmitters", c.transmitters);
    read(s, p, "alpha", c.sim_alpha);
    read(s, p, "tau_prime", c.sim_tau_prime);
    read(s, p, "n_trials", c.n_trials);
    read(s, p, "seed", c.seed);
    read(s, p, "empirical_mse", c.empirical_mse);
  }
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    const std::string p = "/solver";
    SolverOptions& o = c.numerics.solver;
    check_keys(s, p, {"damping", "tolerance", "max_iterations", "start_offset", "multistable_gap", "aitken"});
    read(s, p, "damping", o.damping);
    read(s, p, "tolerance", o.tolerance);
    read(s, p, "max_iterations", o.max_iterations);
    read(s, p, "start_offset", o.start_offset);
    read(s, p, "multistable_gap", o.multistable_gap);
    read(s, p, "aitken", o.accelerate);
  }
  if (doc.contains("quadrature")) {
    const json& s = doc["quadrature"];
    const std::string p = "/quadrature";
    check_keys(s, p, {"nodes", "z_max", "points_per_segment"});
    read(s, p, "nodes", c.quadrature_nodes);
    read(s, p, "z_max", c.numerics.quadrature.z_max);
    read(s, p, "points_per_segment", c.numerics.quadrature.points);
  }
  if (doc.contains("optimizer")) {
    const json& s = doc["optimizer"];
    const std::string p = "/optimizer";
    check_keys(s, p, {"grid_points", "tau_min", "tau_tolerance"});
    read(s, p, "grid_points", c.optimizer.grid_points);
    read(s, p, "tau_min", c.optimizer.tau_min);
    read(s, p, "tau_tolerance", c.optimizer.tau_tolerance);
  }
  if (doc.contains("gamp")) {
    const json& s = doc["gamp"];
    const std::string p = "/gamp";
    check_keys(s, p, {"damping", "max_iterations", "tolerance", "variance_floor"});
    read(s, p, "damping", c.gamp.damping);
    read(s, p, "max_iterations", c.gamp.max_iterations);
    read(s, p, "tolerance", c.gamp.tolerance);
    read(s, p, "variance_floor", c.gamp.variance_floor);
  }
  validate_run_config(c);
  c.sync_quadrature();
  return c;
}

std::string explain_run_config(const RunConfig& c) {
  ojson doc;
  doc["system"] = {{"rho_db", extended(c.rho_db)},
                   {"sigma2", c.sigma2},
                   {"alpha", c.alpha},
                   {"beta", c.beta},
                   {"tau", optional_number(c.tau)},
                   {"tau_prime", optional_number(c.tau_prime)},
                   {"adc_bits", resolution(c.adc)},
                   {"dac_bits", resolution(c.dac)},
                   {"step", optional_number(c.step)},
                   {"mse_g", optional_number(c.mse_g)}};
  doc["targets"] = {{"rate", optional_number(c.target_rate)}, {"ser", optional_number(c.target_ser)}};
  doc["simulation"] = {{"transmitters", c.transmitters},     {"alpha", c.sim_alpha},
                       {"tau_prime", c.sim_tau_prime},       {"n_trials", c.n_trials},
                       {"seed", c.seed},                     {"empirical_mse", c.empirical_mse}};
  const SolverOptions& s = c.numerics.solver;
  doc["solver"] = {{"damping", s.damping},           {"tolerance", s.tolerance},
                   {"max_iterations", s.max_iterations}, {"start_offset", s.start_offset},
                   {"multistable_gap", s.multistable_gap}, {"aitken", s.accelerate}};
  doc["quadrature"] = {{"nodes", c.quadrature_nodes},
                       {"z_max", c.numerics.quadrature.z_max},
                       {"points_per_segment", c.numerics.quadrature.points}};
  doc["optimizer"] = {{"grid_points", c.optimizer.grid_points},
                      {"tau_min", c.optimizer.tau_min},
                      {"tau_tolerance", c.optimizer.tau_tolerance}};
  doc["gamp"] = {{"damping", c.gamp.damping},
                 {"max_iterations", c.gamp.max_iterations},
                 {"tolerance", c.gamp.tolerance},
                 {"variance_floor", c.gamp.variance_floor}};
  return doc.dump(2) + "\n";
}

}  // namespace qlst
