// Acceptance checks, one line per criterion:
//
//   acceptance [--threads N] [criterion ...]      (no numbers: all of 1..11)
//
// Exit status is nonzero when any selected criterion fails.

#include "qlst/gamp.hpp"
#include "qlst/gamp_sim.hpp"
#include "qlst/presets.hpp"
#include "qlst/quantizer.hpp"
#include "qlst/rate_optimizer.hpp"
#include "qlst/replica.hpp"
#include "qlst/scalar_awgn.hpp"
#include "qlst/ser.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace qlst;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
int g_threads = 1;

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!ok || notes.size() < 40) notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double db(double x) { return std::pow(10.0, x / 10.0); }

/// Passes the preset assertions whose names start with one of `prefixes`,
/// plus the point-failure budget.
void preset_assertions(Outcome& out, const PresetReport& rep, const std::vector<std::string>& prefixes) {
  int matched = 0;
  for (const AssertionResult& a : rep.assertions) {
    bool take = a.name.rfind("point failures", 0) == 0;
    for (const std::string& p : prefixes) take = take || a.name.rfind(p, 0) == 0;
    if (!take) continue;
    ++matched;
    out.check(a.passed, rep.id + ": " + a.name + (a.detail.empty() ? "" : " [" + a.detail + "]"));
  }
  out.check(matched > 1, rep.id + ": relevant assertions present (" + std::to_string(matched) + ")");
}

// ---------------------------------------------------------------------------

void c1_step_calibration(Outcome& out) {
  const struct {
    int bits;
    double stated;
  } cases[] = {{2, 0.47}, {3, 0.27}};
  for (const auto& c : cases)
    for (double rho : {1.0, 10.0, 100.0}) {
      const double coef = calibrate_step(c.bits, rho) / std::sqrt(rho + 1.0);
      out.check(std::abs(coef - c.stated) <= 0.005, "b=" + std::to_string(c.bits) + " rho=" + num(rho) +
                                                        ": coefficient " + num(coef) + " vs " + num(c.stated));
    }
}

void c2_closed_forms(Outcome& out) {
  const ScalarPrior g = ScalarPrior::gaussian();
  for (double l : {0.1, 1.0, 10.0}) {
    const double i = mutual_info_awgn(l, g), m = mmse_awgn(l, g);
    out.check(std::abs(i - std::log2(1.0 + l)) <= 1e-8, "I(" + num(l) + ") = " + num(i));
    out.check(std::abs(m - 1.0 / (1.0 + l)) <= 1e-8, "mmse(" + num(l) + ") = " + num(m));
  }
  const QuantizerSpec lin = QuantizerSpec::linear();
  for (double s : {0.3, 1.0, 4.0}) {
    const double h = hbar(1.0, s, lin), x = chi(1.0, s, lin);
    out.check(h == std::log2(std::numbers::pi * std::numbers::e * s), "hbar linear s=" + num(s) + " exact");
    out.check(x == 1.0 / s, "chi linear s=" + num(s) + " exact");
  }
  const double c12 = chi(2.0, 1.0, QuantizerSpec::calibrated(Resolution::finite(12), 2.0));
  out.check(std::abs(c12 - 1.0) <= 0.02, "b=12 chi(2, 1) = " + num(c12));
}

void c3_equivalence(Outcome& out) {
  double worst = 0.0;
  for (double rho_db : {0.0, 10.0, 20.0})
    for (double alpha : {0.5, 2.0, 8.0})
      for (Resolution b : {Resolution::finite(1), Resolution::infinite()}) {
        SystemConfig c;
        c.rho = db(rho_db);
        c.alpha = alpha;
        c.beta = 40.0;
        c.tau = 0.1;
        c.adc = b;
        c.dac = Resolution::finite(1);
        const double known = analyze(c).mutual_info, unknown = mutual_info_unknown_channel(c);
        const double gap = std::abs(known - unknown);
        worst = std::max(worst, gap);
        out.check(gap <= 1e-8, "rho=" + num(rho_db) + " dB alpha=" + num(alpha) + " b=" + b.to_string() +
                                   ": gap " + num(gap));
      }
  out.notes.push_back("worst gap " + num(worst));
}

void c4_fig1(Outcome& out) {
  PresetOptions o;
  o.threads = g_threads;
  o.alpha = {0.1, 1.0, 10.0, 100.0, 1000.0};
  preset_assertions(out, run_preset("fig1", o), {"90% marker"});
}

void c5_fig2(Outcome& out) {
  PresetOptions o;
  o.threads = g_threads;
  o.alpha = {0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0};
  preset_assertions(out, run_preset("fig2", o),
                    {"tau_opt at the 90% marker", "tau_opt * beta < 1", "large-alpha tau_opt formula"});
}

void c6_saturation(Outcome& out) {
  for (int a : {1, 2}) {
    SystemConfig c;
    c.rho = 10.0;
    c.beta = 40.0;
    c.tau = 0.07;
    c.adc = Resolution::finite(1);
    c.dac = Resolution::finite(a);
    const SaturationReport s = saturation_check(c);
    out.check(std::abs(s.final_gap) <= 0.05 && s.alphas.back() == 1e4,
              "a=" + std::to_string(a) + ": alpha I at 1e4 = " + num(s.scaled_info.back()) + ", limit " + num(s.limit));
  }
}

void c7_bussgang(Outcome& out) {
  PresetOptions o;
  o.threads = g_threads;
  for (double s = -10.0; s <= 6.0; s += 2.0) o.snr_db.push_back(s);
  preset_assertions(out, run_preset("fig4", o), {"alpha=10, a=1, b=1", "alpha=0.1, b="});
}

void c8_ser(Outcome& out) {
  out.check(ser_qpsk_theory(0.0) == 0.75, "ser(0) = " + num(ser_qpsk_theory(0.0)));
  double last = ser_qpsk_theory(0.0);
  bool mono = true;
  for (double q = 0.05; q < 60.0; q *= 1.1) {
    const double s = ser_qpsk_theory(q);
    mono = mono && s < last;
    last = s;
  }
  out.check(mono, "strictly decreasing in qtilde on (0, 60)");
  const SerSystem sys{10.0, Resolution::finite(1), std::nullopt};
  const double exact = ser_pipeline(sys, 100.0, 2.0).ser, approx = ser_large_alpha(sys, 100.0, 2.0).ser;
  out.check(std::abs(approx / exact - 1.0) <= 0.05,
            "alpha=100: pipeline " + num(exact) + ", large-alpha " + num(approx));
}

void c9_fig8(Outcome& out) {
  PresetOptions o;
  o.threads = g_threads;
  o.n_trials = 20000;
  o.seed = 1;
  preset_assertions(out, run_preset("fig8", o), {"|simulated - theory|"});
}

void c10_properties(Outcome& out) {
  // Kernel normalization.
  double tele = 0.0;
  for (int bits : {1, 2, 3})
    for (double w : {-3.0, -0.4, 0.0, 1.7})
      for (double s : {0.05, 1.0, 6.0}) {
        const QuantizerSpec q = QuantizerSpec::uniform(bits, 0.6);
        double sum = 0.0;
        for (int k = 1; k <= q.levels(); ++k) sum += psi(k, w, s, q);
        tele = std::max(tele, std::abs(sum - 1.0));
      }
  out.check(tele <= 1e-12, "sum_k Psi_k = 1, worst " + num(tele));

  // Power conservation and fixed-point residuals.
  double cons = 0.0, resid = 0.0;
  for (double rho_db : {0.0, 10.0, 30.0})
    for (Resolution b : {Resolution::finite(1), Resolution::finite(3), Resolution::infinite()}) {
      SystemConfig c;
      c.rho = db(rho_db);
      c.alpha = 3.0;
      c.tau_prime = 2.0;
      c.adc = b;
      const Analysis a = analyze(c);
      const FixedPointSolution& f = a.fixed_point;
      cons = std::max(cons, std::abs(f.rho_bar + f.sigma2_bar - (c.rho + c.sigma2)) / (c.rho + c.sigma2));
      resid = std::max(resid, f.residual);
      resid = std::max(resid, solve_training_fixed_point(c).residual);
    }
  out.check(cons <= 1e-12, "rho_bar + sigma2_bar = rho + sigma2, worst relative " + num(cons));
  out.check(resid <= 1e-10, "fixed-point residuals, worst " + num(resid));

  // Discrete inputs never beat the Gaussian (linear) MMSE.
  bool dominated = true;
  for (int a : {1, 2, 3})
    for (double l = 0.01; l < 1e3; l *= 1.7) dominated = dominated && mmse_awgn(l, ScalarPrior::discrete(a)) <= 1.0 / (1.0 + l) + 1e-12;
  out.check(dominated, "mmse_awgn(discrete) <= 1/(1+lambda)");

  // GAMP against the exact LMMSE solve.
  {
    const int m = 400, n = 100, cols = 3;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    auto cg = [&] { return std::complex<double>(g(rng), g(rng)); };
    Eigen::MatrixXcd a(m, n), u(n, cols);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = cg() / std::sqrt(double(n));
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < cols; ++l) u(j, l) = cg();
    const double nv = 0.2;
    GampObservations y;
    y.values = a * u;
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < cols; ++l) y.values(i, l) += cg() * std::sqrt(nv);
    GampProblem p;
    p.matrix = &a;
    p.entry_power = 1.0 / n;
    p.noise_var = nv;
    GampOptions opt;
    opt.max_iterations = 500;
    opt.tolerance = 1e-15;
    const GampResult r = gamp_solve(p, y, opt);
    const Eigen::MatrixXcd ah = a.adjoint();
    const Eigen::MatrixXcd lmmse =
        (ah * a + nv * Eigen::MatrixXcd::Identity(n, n)).ldlt().solve(ah * y.values);
    const double rel = (r.mean - lmmse).norm() / lmmse.norm();
    out.check(rel <= 1e-4, "GAMP vs LMMSE relative difference " + num(rel));
  }

  // Monte Carlo determinism across thread counts.
  {
    TrialConfig t;
    t.transmitters = 20;
    t.alpha = 5.0;
    t.tau_prime = 2.0;
    t.rho = 3.0;
    const McResult a = monte_carlo_ser(t, 16, 77, 1), b = monte_carlo_ser(t, 16, 77, 4);
    const bool same = a.symbol_errors == b.symbol_errors && a.n_symbol_decisions == b.n_symbol_decisions &&
                      a.mean_channel_mse == b.mean_channel_mse && a.mean_ser == b.mean_ser &&
                      a.diverged_trials == b.diverged_trials;
    out.check(same, "Monte Carlo identical for 1 and 4 threads");
  }
}

void c11_asymptotes(Outcome& out) {
  for (Resolution b : {Resolution::finite(1), Resolution::finite(2), Resolution::finite(3), Resolution::infinite()}) {
    SystemConfig c;
    c.rho = kInf;
    c.beta = 40.0;
    c.adc = b;
    c.dac = Resolution::finite(1);
    const AlphaSearchResult r = required_alpha_for_rate(1.8, c, false);
    const SearchResult s = required_alpha_for_ser(0.01, {kInf, b, std::nullopt}, 2.0);
    if (b.is_infinite()) {
      out.check(r.below_bracket, "rate 1.8, b=inf: alpha -> 0 (" + num(r.alpha) + ")");
      out.check(s.below_bracket, "SER 1%, b=inf: alpha -> 0 (" + num(s.value) + ")");
    } else {
      out.check(!r.below_bracket && std::isfinite(r.alpha) && r.alpha > 0.0,
                "rate 1.8, b=" + b.to_string() + ": floor alpha " + num(r.alpha));
      out.check(!s.below_bracket && std::isfinite(s.value) && s.value > 0.0,
                "SER 1%, b=" + b.to_string() + ": floor alpha " + num(s.value));
    }
  }
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "step calibration coefficients", c1_step_calibration},
      {2, "closed-form limits", c2_closed_forms},
      {3, "unknown-channel route equals known-channel route", c3_equivalence},
      {4, "90%-of-saturation markers", c4_fig1},
      {5, "training fraction at the markers and large alpha", c5_fig2},
      {6, "saturation at 2a", c6_saturation},
      {7, "linearized receiver regime", c7_bussgang},
      {8, "QPSK SER formula", c8_ser},
      {9, "GAMP Monte Carlo SER vs theory", c9_fig8},
      {10, "property suite", c10_properties},
      {11, "asymptote detection at rho = inf", c11_asymptotes},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  const unsigned hw = std::thread::hardware_concurrency();
  g_threads = hw > 0 ? int(hw) : 1;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--threads" && i + 1 < argc) {
      g_threads = std::max(1, std::stoi(argv[++i]));
    } else {
      selected.push_back(std::stoi(arg));
    }
  }
  if (selected.empty())
    for (const Criterion& c : criteria()) selected.push_back(c.id);

  bool all_passed = true;
  for (int id : selected) {
    const Criterion* c = nullptr;
    for (const Criterion& k : criteria())
      if (k.id == id) c = &k;
    if (!c) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c->run(out);
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const std::string& n : out.notes) std::cout << "    " << n << "\n";
    std::printf("criterion %d: %s (%s, %.1f s)\n", c->id, out.passed ? "PASS" : "FAIL", c->title, secs);
    std::fflush(stdout);
    all_passed = all_passed && out.passed;
  }
  return all_passed ? 0 : 1;
}
