// qlst: rates, training and symbol-error analysis for quantized large-scale
// multiuser receivers.
//
//   qlst analyze  [--config F] [system flags] [--tau T | --tau-prime T] [--mse-g M]
//   qlst optimize [--config F] [system flags] [--target R]
//   qlst ser      [--config F] [system flags] --tau-prime T [--target P]
//   qlst simulate [--config F] [--n-trials N] [--seed S] [--alpha A] [--tau-prime T]
//   qlst preset   <id> [--out DIR] [--n-trials N] [--seed S]   (qlst preset --list)
//
// Every command accepts --explain (print the effective config and exit),
// --threads (default: $QLST_THREADS) and --out. Exit codes: 0 ok, 1 config,
// 2 numeric, 3 unreachable target.

#include "qlst/errors.hpp"
#include "qlst/gamp.hpp"
#include "qlst/gamp_sim.hpp"
#include "qlst/presets.hpp"
#include "qlst/rate_optimizer.hpp"
#include "qlst/replica.hpp"
#include "qlst/run_config.hpp"
#include "qlst/ser.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using ojson = nlohmann::ordered_json;
using namespace qlst;

enum ExitCode { kOk = 0, kConfig = 1, kNumeric = 2, kUnreachable = 3 };

ojson number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double parse_db(const std::string& text, const char* flag) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw ConfigError(std::string(flag) + ": expected dB value or inf", flag);
  return v;
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_db(item, flag));
  if (out.empty()) throw ConfigError(std::string(flag) + ": empty list", flag);
  return out;
}

/// Command-line values; unset ones leave the config file (or default) alone.
struct Flags {
  std::string config_path;
  bool explain = false;
  int threads = 1;
  std::string out;
  std::optional<std::string> rho_db;
  std::optional<double> sigma2, alpha, beta, tau, tau_prime, step, mse_g, target;
  std::optional<std::string> adc, dac;
  std::optional<int> n_trials, transmitters;
  std::optional<std::uint64_t> seed;
  bool empirical_mse = false;
  // preset
  std::string preset_id;
  bool list = false;
  std::optional<std::string> snr_list, alpha_list, beta_list;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON run config")->check(CLI::ExistingFile);
  cmd->add_flag("--explain", f.explain, "Print the effective config (all defaults) and exit");
  cmd->add_option("--threads", f.threads, "Worker threads (results do not depend on it)")
      ->envname("QLST_THREADS")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output path");
}

void add_system(CLI::App* cmd, Flags& f) {
  cmd->add_option("--rho-db", f.rho_db, "Pre-quantization SNR in dB, or inf");
  cmd->add_option("--sigma2", f.sigma2, "Noise variance");
  cmd->add_option("--beta", f.beta, "Block length per transmitter T/M");
  cmd->add_option("--bits,--adc-bits", f.adc, "ADC resolution b (integer or inf)");
  cmd->add_option("--a,--dac-bits", f.dac, "Input resolution a: 2^{2a}-QAM (integer or inf)");
  cmd->add_option("--step", f.step, "Quantizer step (calibrated when absent)");
}

void apply(const Flags& f, RunConfig& c, bool simulate) {
  if (f.rho_db) c.rho_db = parse_db(*f.rho_db, "--rho-db");
  if (f.sigma2) c.sigma2 = *f.sigma2;
  if (f.beta) c.beta = *f.beta;
  try {
    if (f.adc) c.adc = Resolution::parse(*f.adc);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--bits: ") + e.what(), "--bits");
  }
  try {
    if (f.dac) c.dac = Resolution::parse(*f.dac);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--a: ") + e.what(), "--a");
  }
  if (f.step) c.step = *f.step;
  if (simulate) {
    if (f.alpha) c.sim_alpha = *f.alpha;
    if (f.tau_prime) c.sim_tau_prime = *f.tau_prime;
  } else {
    if (f.alpha) c.alpha = *f.alpha;
    if (f.tau) {
      c.tau = *f.tau;
      c.tau_prime.reset();
    }
    if (f.tau_prime) {
      c.tau_prime = *f.tau_prime;
      c.tau.reset();
    }
  }
  if (f.mse_g) c.mse_g = *f.mse_g;
  if (f.n_trials) c.n_trials = *f.n_trials;
  if (f.transmitters) c.transmitters = *f.transmitters;
  if (f.seed) c.seed = *f.seed;
  if (f.empirical_mse) c.empirical_mse = true;
  validate_run_config(c);
  c.sync_quadrature();
}

RunConfig load(const Flags& f, bool simulate) {
  RunConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    std::stringstream text;
    text << in.rdbuf();
    c = parse_run_config(text.str());
  }
  apply(f, c, simulate);
  return c;
}

void emit(const Flags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(f.out, std::ios::binary);
  if (!file) throw ConfigError("--out: cannot open " + f.out, "--out");
  file << text;
}

void require_qpsk(const RunConfig& c) {
  if (c.dac != Resolution::finite(1)) throw ConfigError("/system/dac_bits: SER analysis assumes QPSK (a = 1)",
                                                        "/system/dac_bits");
}

// ---------------------------------------------------------------------------

int cmd_analyze(const Flags& f) {
  const RunConfig c = load(f, false);
  if (!c.tau && !c.tau_prime) throw ConfigError("/system/tau: analyze needs tau or tau_prime", "/system/tau");
  const SystemConfig sys = c.system();
  const Analysis a = analyze(sys, c.numerics, c.mse_g);
  const double tau = c.tau ? *c.tau : *c.tau_prime / c.beta;
  ojson r;
  r["mse_g"] = number(a.fixed_point.mse_g);
  r["q_g"] = number(a.fixed_point.q_g);
  r["qtilde_g"] = number(a.fixed_point.qtilde_g);
  r["rho_bar"] = number(a.fixed_point.rho_bar);
  r["sigma2_bar"] = number(a.fixed_point.sigma2_bar);
  r["q_x"] = number(a.fixed_point.q_x);
  r["qtilde_x"] = number(a.fixed_point.qtilde_x);
  r["mse_x"] = number(a.fixed_point.mse_x);
  r["multistable"] = a.fixed_point.multistable;
  r["mutual_info"] = number(a.mutual_info);
  r["h_cond"] = number(a.h_cond);
  r["h_uncond"] = number(a.h_uncond);
  r["tau"] = number(tau);
  r["rate"] = tau < 1.0 ? number((1.0 - tau) * c.alpha * a.mutual_info) : ojson(nullptr);
  r["rate_known"] = number(rate_known(sys.rho, c.sigma2, c.alpha, c.adc, sys.input_prior(), c.numerics, c.step));
  if (c.dac == Resolution::finite(1)) r["ser"] = number(ser_qpsk_theory(a.fixed_point.qtilde_x));
  emit(f, r.dump(2) + "\n");
  return kOk;
}

int cmd_optimize(const Flags& f) {
  RunConfig c = load(f, false);
  if (f.target) c.target_rate = *f.target;
  validate_run_config(c);
  OptimizerOptions opt = c.optimizer;
  opt.threads = f.threads;
  const SystemConfig sys = c.system();
  ojson r;
  if (c.target_rate) {
    const AlphaSearchResult s = required_alpha_for_rate(*c.target_rate, sys, false, c.numerics, opt);
    r["target_rate"] = number(*c.target_rate);
    r["alpha_required"] = number(s.alpha);
    r["below_bracket"] = s.below_bracket;
    SystemConfig at = sys;
    at.alpha = s.alpha;
    const TrainingOptimum o = optimize_training(at, c.numerics, opt);
    r["tau_opt"] = number(o.tau_opt);
    r["r_opt"] = number(o.value);
  } else {
    const TrainingOptimum o = optimize_training(sys, c.numerics, opt);
    r["alpha"] = number(c.alpha);
    r["tau_opt"] = number(o.tau_opt);
    r["r_opt"] = number(o.value);
    r["failed_grid_points"] = o.failed_points;
    r["r_known"] = number(rate_known(sys.rho, c.sigma2, c.alpha, c.adc, sys.input_prior(), c.numerics, c.step));
    if (!c.adc.is_infinite() && c.adc.bits() <= 2 && std::isfinite(sys.rho) && !c.step) {
      const BussgangRate lin = bussgang_rate(sys.rho / c.sigma2, c.alpha, c.beta, c.adc.bits(), sys.input_prior(),
                                             c.numerics, opt);
      r["r_l"] = number(lin.optimum.value);
      r["tau_l"] = number(lin.optimum.tau_opt);
    }
  }
  emit(f, r.dump(2) + "\n");
  return kOk;
}

int cmd_ser(const Flags& f) {
  RunConfig c = load(f, false);
  if (f.target) c.target_ser = *f.target;
  validate_run_config(c);
  require_qpsk(c);
  if (!c.tau && !c.tau_prime) throw ConfigError("/system/tau_prime: ser needs tau_prime (or tau)", "/system/tau_prime");
  if (c.sigma2 != 1.0) throw ConfigError("/system/sigma2: SER analysis uses unit noise variance", "/system/sigma2");
  const double tau_prime = c.tau_prime ? *c.tau_prime : *c.tau * c.beta;
  const SerSystem sys{c.rho(), c.adc, c.step};
  const SerReport s = ser_pipeline(sys, c.alpha, tau_prime, c.numerics);
  ojson r;
  r["alpha"] = number(c.alpha);
  r["tau_prime"] = number(tau_prime);
  r["ser"] = number(s.ser);
  r["qtilde_x"] = number(s.qtilde_x);
  r["mse_g"] = number(s.fixed_point.mse_g);
  r["rho_bar"] = number(s.fixed_point.rho_bar);
  r["sigma2_bar"] = number(s.fixed_point.sigma2_bar);
  r["regime"] = s.regime == SerRegime::Exact ? "exact" : "large_alpha";
  if (c.target_ser) {
    const SearchResult t = required_tau_prime_for_ser(*c.target_ser, sys, c.alpha, c.numerics);
    const SearchResult a = required_alpha_for_ser(*c.target_ser, sys, tau_prime, c.numerics);
    r["target_ser"] = number(*c.target_ser);
    r["tau_prime_required"] = number(t.value);
    r["tau_prime_below_bracket"] = t.below_bracket;
    r["alpha_required"] = number(a.value);
    r["alpha_below_bracket"] = a.below_bracket;
  }
  emit(f, r.dump(2) + "\n");
  return kOk;
}

int cmd_simulate(const Flags& f) {
  const RunConfig c = load(f, true);
  require_qpsk(c);
  if (c.sigma2 != 1.0) throw ConfigError("/system/sigma2: simulation uses unit noise variance", "/system/sigma2");
  const TrialConfig t = c.trial();
  const McResult mc = monte_carlo_ser(t, c.n_trials, c.seed, f.threads, c.numerics);
  const SerReport theory = ser_pipeline({t.rho, t.adc, t.step}, t.alpha, t.tau_prime, c.numerics);
  ojson r;
  r["transmitters"] = t.transmitters;
  r["receivers"] = t.receivers();
  r["training_length"] = t.training_length();
  r["n_trials"] = mc.n_trials;
  r["seed"] = c.seed;
  r["ser_sim"] = number(mc.mean_ser);
  r["std_error"] = number(mc.std_error);
  r["symbol_errors"] = mc.symbol_errors;
  r["symbol_decisions"] = mc.n_symbol_decisions;
  r["diverged_trials"] = mc.diverged_trials;
  r["mean_channel_mse"] = number(mc.mean_channel_mse);
  r["mse_g"] = number(mc.mse_g);
  r["ser_theory"] = number(theory.ser);
  emit(f, r.dump(2) + "\n");
  return kOk;
}

int cmd_preset(const Flags& f) {
  if (f.list) {
    for (const PresetInfo& p : preset_catalog()) std::cout << p.id << "\t" << p.description << "\n";
    return kOk;
  }
  if (f.preset_id.empty()) throw ConfigError("preset: missing preset id (see --list)", "id");
  if (!has_preset(f.preset_id)) throw ConfigError("preset: unknown id " + f.preset_id, "id");
  const RunConfig c = load(f, true);
  PresetOptions o;
  o.threads = f.threads;
  o.n_trials = c.n_trials;
  o.seed = c.seed;
  o.numerics = c.numerics;
  if (f.snr_list) o.snr_db = parse_list(*f.snr_list, "--snr-db");
  if (f.alpha_list) o.alpha = parse_list(*f.alpha_list, "--alpha-list");
  if (f.beta_list) o.beta = parse_list(*f.beta_list, "--beta-list");
  const PresetReport report = run_preset(f.preset_id, o);

  const std::filesystem::path dir = f.out.empty() ? std::filesystem::path(".") : std::filesystem::path(f.out);
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (report.id + ".csv"), std::ios::binary);
    if (!csv) throw ConfigError("--out: cannot write into " + dir.string(), "--out");
    write_csv(csv, report.data);
  }
  {
    std::ofstream jl(dir / (report.id + ".jsonl"), std::ios::binary);
    write_json_lines(jl, report);
  }
  for (const AssertionResult& a : report.assertions) {
    ojson j;
    j["assertion"] = a.name;
    j["passed"] = a.passed;
    j["caption_derived"] = a.caption_derived;
    j["detail"] = a.detail;
    std::cout << j.dump() << "\n";
  }
  ojson summary;
  summary["preset"] = report.id;
  summary["points"] = report.points;
  summary["failed_points"] = report.failed_points;
  summary["passed"] = report.passed();
  summary["csv"] = (dir / (report.id + ".csv")).string();
  std::cout << summary.dump() << "\n";
  return report.passed() ? kOk : kNumeric;
}

void print_error(const char* kind, const std::string& message, const ojson& extra = ojson::object()) {
  ojson e;
  e["error"] = kind;
  e["message"] = message;
  for (const auto& [k, v] : extra.items()) e[k] = v;
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized large-scale system analysis: rates, training, SER and GAMP simulation"};
  app.require_subcommand(1);
  Flags f;
  const unsigned hw = std::thread::hardware_concurrency();
  f.threads = hw > 0 ? static_cast<int>(hw) : 1;

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Fixed points, mutual information and rates at a given tau");
  CLI::App* optimize_cmd = app.add_subcommand("optimize", "Optimal training fraction, or alpha for a target rate");
  CLI::App* ser_cmd = app.add_subcommand("ser", "QPSK symbol error rate, or training/alpha for a target SER");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "GAMP Monte Carlo SER");
  CLI::App* preset_cmd = app.add_subcommand("preset", "Run a figure preset, writing <id>.csv and <id>.jsonl");

  for (CLI::App* cmd : {analyze_cmd, optimize_cmd, ser_cmd, simulate_cmd, preset_cmd}) add_common(cmd, f);
  for (CLI::App* cmd : {analyze_cmd, optimize_cmd, ser_cmd, simulate_cmd}) add_system(cmd, f);
  for (CLI::App* cmd : {analyze_cmd, optimize_cmd, ser_cmd, simulate_cmd})
    cmd->add_option("--alpha", f.alpha, "Receivers per transmitter K/M");
  for (CLI::App* cmd : {analyze_cmd, ser_cmd, simulate_cmd})
    cmd->add_option("--tau-prime", f.tau_prime, "Training symbols per transmitter");
  analyze_cmd->add_option("--tau", f.tau, "Training fraction of the block");
  analyze_cmd->add_option("--mse-g", f.mse_g, "Channel-estimation error override");
  optimize_cmd->add_option("--target,--target-rate", f.target, "Rate target (bits/use/transmitter): solve for alpha");
  ser_cmd->add_option("--target,--target-ser", f.target, "SER target: solve for tau_prime and alpha");
  for (CLI::App* cmd : {simulate_cmd, preset_cmd}) {
    cmd->add_option("--n-trials", f.n_trials, "Monte Carlo trials");
    cmd->add_option("--seed", f.seed, "Base seed");
  }
  simulate_cmd->add_option("--transmitters", f.transmitters, "M");
  simulate_cmd->add_flag("--empirical-mse", f.empirical_mse, "Detect with the measured channel error");
  preset_cmd->add_option("id", f.preset_id, "Preset id (fig1 ... fig11)");
  preset_cmd->add_flag("--list", f.list, "List presets");
  preset_cmd->add_option("--snr-db", f.snr_list, "Comma-separated SNR axis override (dB, inf allowed)");
  preset_cmd->add_option("--alpha-list", f.alpha_list, "Comma-separated alpha axis override");
  preset_cmd->add_option("--beta-list", f.beta_list, "Comma-separated beta axis override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("config", e.what());
    return kConfig;
  }

  try {
    if (f.explain) {
      RunConfig c = load(f, simulate_cmd->parsed() || preset_cmd->parsed());
      if (optimize_cmd->parsed() && f.target) c.target_rate = *f.target;
      if (ser_cmd->parsed() && f.target) c.target_ser = *f.target;
      validate_run_config(c);
      std::cout << explain_run_config(c);
      return kOk;
    }
    if (analyze_cmd->parsed()) return cmd_analyze(f);
    if (optimize_cmd->parsed()) return cmd_optimize(f);
    if (ser_cmd->parsed()) return cmd_ser(f);
    if (simulate_cmd->parsed()) return cmd_simulate(f);
    return cmd_preset(f);
  } catch (const ConfigError& e) {
    print_error("config", e.what(), {{"key", e.key()}});
    return kConfig;
  } catch (const UnreachableTarget& e) {
    print_error("unreachable_target", e.what(), {{"ceiling", number(e.ceiling())}});
    return kUnreachable;
  } catch (const std::invalid_argument& e) {
    print_error("config", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    print_error("numeric", e.what());
    return kNumeric;
  }
}
