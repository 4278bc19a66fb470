#include "qlst/rate_optimizer.hpp"

#include "qlst/errors.hpp"
#include "qlst/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>

namespace qlst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol, double& best_x,
                  double& best_f) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc >= fd) {
    best_x = c;
    best_f = fc;
  } else {
    best_x = d;
    best_f = fd;
  }
  return best_f;
}

}  // namespace

constexpr double kTauFloor = 1e-12;

TrainingOptimum maximize_over_tau(const std::function<double(double)>& objective, const OptimizerOptions& options) {
  if (options.grid_points < 3) throw std::invalid_argument("tau grid needs at least 3 points");
  if (!(options.tau_min > 0.0 && options.tau_min < 1.0)) throw std::invalid_argument("tau_min must lie in (0, 1)");
  const int n = options.grid_points;
  TrainingOptimum out;
  out.curve.resize(n);
  std::vector<std::exception_ptr> errors(n);
  const double log_min = std::log(options.tau_min);
  parallel_for(static_cast<std::size_t>(n), options.threads, [&](std::size_t i) {
    const double tau = i + 1 == static_cast<std::size_t>(n) ? 1.0 : std::exp(log_min * (1.0 - double(i) / (n - 1)));
    TauSample s{tau, 0.0, false};
    try {
      s.value = objective(tau);
      s.ok = !std::isnan(s.value);
    } catch (const SolverFailure&) {
      errors[i] = std::current_exception();
    }
    out.curve[i] = s;
  });
  int best = -1;
  for (int i = 0; i < n; ++i) {
    if (!out.curve[i].ok) {
      ++out.failed_points;
      continue;
    }
    if (best < 0 || out.curve[i].value > out.curve[best].value) best = i;
  }
  if (n - out.failed_points < options.min_success_fraction * n || best < 0) {
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    throw std::runtime_error("tau optimization: too many grid points failed");
  }
  out.tau_opt = out.curve[best].tau;
  out.value = out.curve[best].value;
  if (std::isinf(out.value)) return out;

  const auto safe = [&](double tau) {
    try {
      const double v = objective(tau);
      return std::isnan(v) ? -kInf : v;
    } catch (const SolverFailure&) {
      return -kInf;
    }
  };
  double lo = best > 0 ? out.curve[best - 1].tau : out.curve[0].tau;
  double hi = best + 1 < n ? out.curve[best + 1].tau : 1.0;
  if (best == 0) {
    // Maximum at the bottom of the grid (very large alpha): keep stepping
    // down with the grid ratio until the objective turns over.
    const double ratio = out.curve[1].tau / out.curve[0].tau;
    double tau = out.curve[0].tau, value = out.value;
    while (tau > kTauFloor) {
      const double next = tau / ratio;
      const double v = safe(next);
      if (!(v > value)) {
        lo = next;
        break;
      }
      hi = tau;
      tau = next;
      value = v;
      lo = next / ratio;
    }
    out.tau_opt = tau;
    out.value = value;
  }
  double x = 0.0, fx = -kInf;
  golden_max(safe, lo, hi, std::min(options.tau_tolerance, 1e-4 * lo), x, fx);
  if (fx > out.value) {
    out.tau_opt = x;
    out.value = fx;
  }
  return out;
}

double trained_rate(const SystemConfig& cfg, double tau, const NumericsOptions& numerics) {
  SystemConfig c = cfg;
  c.tau = tau;
  c.tau_prime.reset();
  if (tau >= 1.0) {
    c.validate();
    return 0.0;
  }
  const Analysis a = analyze(c, numerics);
  return (1.0 - tau) * cfg.alpha * a.mutual_info;
}

TrainingOptimum optimize_training(const SystemConfig& cfg, const NumericsOptions& numerics,
                                  const OptimizerOptions& options) {
  SystemConfig base = cfg;
  base.tau = 1.0;
  base.tau_prime.reset();
  base.validate();
  return maximize_over_tau([&](double tau) { return trained_rate(base, tau, numerics); }, options);
}

double rate_known(double rho, double sigma2, double alpha, Resolution adc, const ScalarPrior& input_prior,
                  const NumericsOptions& numerics, std::optional<double> step) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const NormalizedSystem sys = normalize(rho, sigma2, adc, step);
  return alpha * known_channel_info(sys.signal, alpha, sys.quantizer, input_prior, numerics).mutual_info;
}

// ---------------------------------------------------------------------------

double bussgang_eta(int bits, double rho) {
  if (bits == 1) return 2.0 / std::numbers::pi;
  if (bits == 2) {
    if (!(rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
    // Delta^2 / (rho + 1) is the squared step coefficient for the calibrated step.
    const double c = step_coefficient(2);
    const double t = 1.0 + 2.0 * std::exp(-c * c);
    return 2.0 / (5.0 * std::numbers::pi) * t * t;
  }
  throw std::invalid_argument("linearized gain is available for 1 and 2 bits only");
}

double bussgang_linear_snr(double eta, double rho) {
  if (std::isinf(rho)) return eta / (1.0 - eta);
  return eta * rho / ((1.0 - eta) * rho + 1.0);
}

double bussgang_effective_snr(double rho_l, double load) {
  return load * rho_l * rho_l / (1.0 + (1.0 + load) * rho_l);
}

BussgangRate bussgang_rate(double rho, double alpha, double beta, int bits, const ScalarPrior& input_prior,
                           const NumericsOptions& numerics, const OptimizerOptions& options) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("alpha and beta must be positive");
  BussgangRate out;
  out.eta = bussgang_eta(bits, rho);
  out.rho_l = bussgang_linear_snr(out.eta, rho);
  const auto objective = [&](double tau) {
    if (tau >= 1.0) return 0.0;
    const double snr = bussgang_effective_snr(out.rho_l, tau * beta);
    const double power = snr / (1.0 + snr);
    const double info =
        known_channel_info(power, alpha, QuantizerSpec::linear(), input_prior, numerics).mutual_info;
    return (1.0 - tau) * alpha * info;
  };
  out.optimum = maximize_over_tau(objective, options);
  return out;
}

double small_alpha_rate(double tau, double rho, double sigma2, double beta, Resolution adc,
                        const NumericsOptions& numerics, std::optional<double> step) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (tau == 1.0) return 0.0;
  const NormalizedSystem sys = normalize(rho, sigma2, adc, step);
  const TrainingSolution t = solve_training_normalized(tau * beta, sys, ScalarPrior::gaussian(), numerics);
  const double power = sys.signal * (1.0 - t.mse_g);
  double gap;
  if (sys.quantizer.is_linear()) {
    gap = power < 1.0 ? -std::log2(1.0 - power) : kInf;
  } else if (power >= 1.0) {
    gap = hbar(0.0, 1.0, sys.quantizer, numerics.quadrature);
  } else {
    gap = hbar(0.0, 1.0, sys.quantizer, numerics.quadrature) -
          hbar(power, 1.0 - power, sys.quantizer, numerics.quadrature);
  }
  return (1.0 - tau) * gap;
}

TrainingOptimum small_alpha_tau_opt(double rho, double sigma2, double beta, Resolution adc,
                                    const NumericsOptions& numerics, const OptimizerOptions& options,
                                    std::optional<double> step) {
  return maximize_over_tau(
      [&](double tau) { return small_alpha_rate(tau, rho, sigma2, beta, adc, numerics, step); }, options);
}

double large_alpha_tau_opt(double rho, double beta, double alpha, Resolution adc) {
  if (!(rho > 0.0) || !(beta > 0.0) || !(alpha > 1.0))
    throw std::invalid_argument("large-alpha training fraction needs rho > 0, beta > 0, alpha > 1");
  const double ratio = std::isinf(rho) ? 1.0 : (rho + 1.0) / rho;
  double base = 2.0 * ratio * ratio * std::log(alpha) / (beta * alpha);
  if (adc.is_infinite()) return base;
  if (adc.bits() == 1) return base * (std::numbers::pi / 2.0) * (std::numbers::pi / 2.0);
  throw std::invalid_argument("large-alpha training fraction is available for 1-bit and linear receivers only");
}

// ---------------------------------------------------------------------------

AlphaSearchResult solve_alpha_for(const std::function<double(double)>& rate_of_alpha, double target,
                                  const AlphaSearchOptions& options, const char* what) {
  if (!(options.alpha_min > 0.0 && options.alpha_max > options.alpha_min))
    throw std::invalid_argument("alpha bracket must satisfy 0 < min < max");
  AlphaSearchResult out;
  const double top = rate_of_alpha(options.alpha_max);
  ++out.evaluations;
  if (!(top >= target)) {
    std::ostringstream msg;
    msg << what << ": target " << target << " not reached at alpha = " << options.alpha_max << " (value " << top
        << ")";
    throw UnreachableTarget(msg.str(), top);
  }
  const double bottom = rate_of_alpha(options.alpha_min);
  ++out.evaluations;
  if (bottom >= target) {
    out.alpha = options.alpha_min;
    out.below_bracket = true;
    return out;
  }
  double lo = std::log(options.alpha_min), hi = std::log(options.alpha_max);
  const double tol = std::log1p(options.relative_tolerance);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double v = rate_of_alpha(std::exp(mid));
    ++out.evaluations;
    (v >= target ? hi : lo) = mid;
  }
  out.alpha = std::exp(hi);
  return out;
}

AlphaSearchResult required_alpha_for_rate(double target, const SystemConfig& cfg, bool known,
                                          const NumericsOptions& numerics, const OptimizerOptions& options,
                                          const AlphaSearchOptions& search) {
  const ScalarPrior prior = cfg.input_prior();
  if (!prior.is_gaussian() && target >= prior.complex_entropy_bits()) {
    std::ostringstream msg;
    msg << "rate target " << target << " is at or above the saturation rate " << prior.complex_entropy_bits();
    throw UnreachableTarget(msg.str(), prior.complex_entropy_bits());
  }
  const auto rate = [&](double alpha) {
    if (known) return rate_known(cfg.rho, cfg.sigma2, alpha, cfg.adc, prior, numerics, cfg.step);
    SystemConfig c = cfg;
    c.alpha = alpha;
    return optimize_training(c, numerics, options).value;
  };
  return solve_alpha_for(rate, target, search, known ? "known-channel rate" : "trained rate");
}

SaturationReport saturation_check(const SystemConfig& cfg, const NumericsOptions& numerics) {
  SaturationReport out;
  const ScalarPrior prior = cfg.input_prior();
  out.limit = prior.is_gaussian() ? kInf : prior.complex_entropy_bits();
  for (double alpha : {1e2, 1e3, 1e4}) {
    SystemConfig c = cfg;
    c.alpha = alpha;
    out.alphas.push_back(alpha);
    out.scaled_info.push_back(alpha * analyze(c, numerics).mutual_info);
  }
  // Once saturated the values agree to rounding; allow for that.
  for (std::size_t i = 1; i < out.scaled_info.size(); ++i)
    if (out.scaled_info[i] < out.scaled_info[i - 1] * (1.0 - 1e-10)) out.monotone = false;
  out.final_gap = out.limit - out.scaled_info.back();
  return out;
}

}  // namespace qlst
