#include "qlst/ser.hpp"

#include "qlst/errors.hpp"
#include "qlst/special.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace qlst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SystemConfig as_config(const SerSystem& sys, double alpha, double tau_prime) {
  SystemConfig cfg;
  cfg.rho = sys.rho;
  cfg.sigma2 = 1.0;
  cfg.alpha = alpha;
  cfg.tau_prime = tau_prime;
  cfg.adc = sys.adc;
  cfg.step = sys.step;
  cfg.dac = Resolution::finite(1);
  return cfg;
}

// Bisection in log(x) on a map whose SER decreases in x.
SearchResult solve_decreasing(const std::function<double(double)>& ser_of, double target, const SerSearchOptions& opt,
                              const char* what) {
  if (!(target > 0.0 && target < 0.75)) throw std::invalid_argument("SER target must lie in (0, 0.75)");
  if (!(opt.lower > 0.0 && opt.upper > opt.lower)) throw std::invalid_argument("search bracket must satisfy 0 < lo < hi");
  SearchResult out;
  const double best = ser_of(opt.upper);
  ++out.evaluations;
  if (!(best <= target)) {
    std::ostringstream msg;
    msg << what << ": SER " << best << " at the top of the bracket (" << opt.upper << ") is above the target "
        << target;
    throw UnreachableTarget(msg.str(), best);
  }
  const double worst = ser_of(opt.lower);
  ++out.evaluations;
  if (worst <= target) {
    out.value = opt.lower;
    out.below_bracket = true;
    return out;
  }
  double lo = std::log(opt.lower), hi = std::log(opt.upper);
  const double tol = std::log1p(opt.relative_tolerance);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    ++out.evaluations;
    (ser_of(std::exp(mid)) <= target ? hi : lo) = mid;
  }
  out.value = std::exp(hi);
  return out;
}

}  // namespace

double ser_qpsk_theory(double qtilde) {
  if (!(qtilde >= 0.0)) throw std::invalid_argument("qtilde must be nonnegative");
  if (std::isinf(qtilde)) return 0.0;
  const double q = normal_sf(std::sqrt(qtilde));
  return 2.0 * q - q * q;
}

SerReport ser_pipeline(const SerSystem& sys, double alpha, double tau_prime, const NumericsOptions& numerics) {
  if (!(tau_prime > 0.0)) throw std::invalid_argument("tau_prime must be positive");
  const Analysis a = analyze(as_config(sys, alpha, tau_prime), numerics);
  SerReport out;
  out.fixed_point = a.fixed_point;
  out.qtilde_x = a.fixed_point.qtilde_x;
  out.ser = ser_qpsk_theory(out.qtilde_x);
  return out;
}

SerReport ser_large_alpha(const SerSystem& sys, double alpha, double tau_prime, const NumericsOptions& numerics) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(tau_prime > 0.0)) throw std::invalid_argument("tau_prime must be positive");
  const SystemConfig cfg = as_config(sys, alpha, tau_prime);
  cfg.validate();
  const NormalizedSystem norm = normalize(cfg);
  const TrainingSolution t = solve_training_normalized(tau_prime, norm, cfg.channel_prior, numerics);
  const double power = norm.signal * (1.0 - t.mse_g);
  const double noise = 1.0 - power;
  double qtilde = 0.0;
  if (power > 0.0) qtilde = noise > 0.0 ? alpha * power * chi(power, noise, norm.quantizer, numerics.quadrature) : kInf;

  SerReport out;
  out.regime = SerRegime::LargeAlpha;
  FixedPointSolution& fp = out.fixed_point;
  fp.q_g = t.q_g;
  fp.qtilde_g = t.qtilde_g;
  fp.mse_g = t.mse_g;
  const EquivalentSystem eq = equivalent_system(sys.rho, 1.0, t.mse_g);
  fp.rho_bar = eq.rho_bar;
  fp.sigma2_bar = eq.sigma2_bar;
  fp.q_x = 1.0;
  fp.mse_x = 0.0;
  fp.qtilde_x = qtilde;
  fp.iterations = t.iterations;
  fp.residual = t.residual;
  fp.multistable = t.multistable;
  out.qtilde_x = qtilde;
  out.ser = std::isinf(qtilde) ? 0.0 : 2.0 * normal_sf(std::sqrt(qtilde));
  return out;
}

SearchResult required_tau_prime_for_ser(double target_ser, const SerSystem& sys, double alpha,
                                        const NumericsOptions& numerics, const SerSearchOptions& search) {
  return solve_decreasing([&](double tp) { return ser_pipeline(sys, alpha, tp, numerics).ser; }, target_ser, search,
                          "required training load");
}

SearchResult required_alpha_for_ser(double target_ser, const SerSystem& sys, double tau_prime,
                                    const NumericsOptions& numerics, const SerSearchOptions& search) {
  return solve_decreasing([&](double alpha) { return ser_pipeline(sys, alpha, tau_prime, numerics).ser; },
                          target_ser, search, "required receiver ratio");
}

double critical_snr_db(double alpha, Resolution adc, const NumericsOptions& numerics, double target_ser,
                       double tau_prime) {
  const auto ser_at = [&](double rho) {
    SerSystem sys{rho, adc, std::nullopt};
    return ser_pipeline(sys, alpha, tau_prime, numerics).ser;
  };
  const double floor = ser_at(kInf);
  if (!(floor <= target_ser)) {
    std::ostringstream msg;
    msg << "critical SNR: SER " << floor << " at infinite SNR is above the target " << target_ser;
    throw UnreachableTarget(msg.str(), floor);
  }
  double lo = -40.0, hi = 80.0;
  if (ser_at(std::pow(10.0, lo / 10.0)) <= target_ser) return lo;
  while (ser_at(std::pow(10.0, hi / 10.0)) > target_ser) {
    lo = hi;
    hi += 40.0;
    if (hi > 400.0) throw UnreachableTarget("critical SNR: target approached only asymptotically", floor);
  }
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (ser_at(std::pow(10.0, mid / 10.0)) <= target_ser ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace qlst
