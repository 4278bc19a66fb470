#include "qlst/replica.hpp"

#include "qlst/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace qlst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPsiFloor = 1e-300;

void require_positive_s(double s, const char* who) {
  if (!(s > 0.0)) throw std::invalid_argument(std::string(who) + ": s must be positive");
}

OutputFunctionals quantized_functionals(double gamma, double s, const QuantizerSpec& spec,
                                        const QuadratureOptions& options, bool want_hbar, bool want_chi) {
  const int levels = spec.levels();
  thread_local std::vector<double> psi_buf, dpsi_buf;
  psi_buf.resize(levels);
  dpsi_buf.resize(levels);

  auto at = [&](double w, double& h, double& c) {
    level_kernels(w, s, spec, psi_buf, dpsi_buf);
    h = 0.0;
    c = 0.0;
    for (int k = 0; k < levels; ++k) {
      const double p = psi_buf[k];
      if (p < kPsiFloor) continue;
      if (want_hbar) h -= p * std::log2(p);
      if (want_chi) c += dpsi_buf[k] * dpsi_buf[k] / p;
    }
  };

  if (gamma == 0.0) {
    double h, c;
    at(0.0, h, c);
    return {2.0 * h, c};
  }

  const double sg = std::sqrt(gamma);
  const double width = std::sqrt(s) / sg;
  std::vector<Feature> features;
  features.reserve(spec.thresholds().size());
  for (double r : spec.thresholds()) features.push_back({kSqrt2 * r / sg, width});
  const GaussianRule rule = GaussianRule::build(features, options);

  double hsum = 0.0, csum = 0.0;
  const auto z = rule.nodes();
  const auto wt = rule.weights();
  for (std::size_t i = 0; i < z.size(); ++i) {
    double h, c;
    at(sg * z[i], h, c);
    hsum += wt[i] * h;
    csum += wt[i] * c;
  }
  return {2.0 * hsum, csum};
}

// Overlap map of a power-normalized system: signal `power`, noise 1 - power.
double normalized_qtilde(double load, double power, double q, const QuantizerSpec& quantizer,
                         const QuadratureOptions& quad) {
  if (load == 0.0 || power == 0.0) return 0.0;
  const double gamma = power * q;
  const double s = (1.0 - power) + power * (1.0 - q);
  if (!(s > 0.0)) return kInf;
  return load * power * chi(gamma, s, quantizer, quad);
}

// Smaller root m of P m^2 + (N + L P - P) m - N = 0, the overlap fixed point of a
// linear receiver with Gaussian prior (m = 1 - q).
double linear_gaussian_mse(double load, double power) {
  const double noise = 1.0 - power;
  if (power == 0.0 || load == 0.0) return 1.0;
  const double b = noise + load * power - power;
  const double disc = std::sqrt(b * b + 4.0 * power * noise);
  if (b > 0.0) return 2.0 * noise / (b + disc);
  return (disc - b) / (2.0 * power);
}

struct Run {
  double q;
  double residual;
  int iterations;
  bool converged;
};

Run picard(const std::function<double(double)>& next_q, double q0, const SolverOptions& opt) {
  double q = q0;
  double hist[3];
  int nhist = 0;
  double residual = kInf;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double g = next_q(q);
    if (!std::isfinite(g)) return {q, kInf, it, false};
    residual = std::abs(g - q);
    if (residual <= opt.tolerance) return {g, residual, it, true};
    double qn = (1.0 - opt.damping) * q + opt.damping * g;
    if (opt.accelerate) {
      hist[nhist++] = qn;
      if (nhist == 3) {
        // Aitken extrapolation when the last three iterates contract monotonically.
        const double d1 = hist[1] - hist[0];
        const double d2 = hist[2] - hist[1];
        const double ratio = d2 / d1;
        if (d1 != 0.0 && ratio > 0.0 && ratio < 0.999) {
          const double acc = hist[2] + d2 * ratio / (1.0 - ratio);
          if (acc >= 0.0 && acc <= 1.0) qn = acc;
        }
        nhist = 0;
      }
    }
    q = std::clamp(qn, 0.0, 1.0);
  }
  return {q, residual, opt.max_iterations, false};
}

}  // namespace

OutputFunctionals output_functionals(double gamma, double s, const QuantizerSpec& spec,
                                     const QuadratureOptions& options) {
  require_positive_s(s, "output_functionals");
  if (!(gamma >= 0.0)) throw std::invalid_argument("output_functionals: gamma must be nonnegative");
  if (spec.is_linear()) return {std::log2(std::numbers::pi * std::numbers::e * s), 1.0 / s};
  return quantized_functionals(gamma, s, spec, options, true, true);
}

double hbar(double gamma, double s, const QuantizerSpec& spec, const QuadratureOptions& options) {
  require_positive_s(s, "hbar");
  if (!(gamma >= 0.0)) throw std::invalid_argument("hbar: gamma must be nonnegative");
  if (spec.is_linear()) return std::log2(std::numbers::pi * std::numbers::e * s);
  return quantized_functionals(gamma, s, spec, options, true, false).hbar;
}

double chi(double gamma, double s, const QuantizerSpec& spec, const QuadratureOptions& options) {
  require_positive_s(s, "chi");
  if (!(gamma >= 0.0)) throw std::invalid_argument("chi: gamma must be nonnegative");
  if (spec.is_linear()) return 1.0 / s;
  return quantized_functionals(gamma, s, spec, options, false, true).chi;
}

OverlapSolution solve_overlap_map(const std::function<double(double)>& qtilde_of_q, const ScalarPrior& prior,
                                  const NumericsOptions& options) {
  const auto next_q = [&](double q) {
    const double qt = qtilde_of_q(q);
    return 1.0 - mmse_awgn(qt, prior, options.awgn);
  };
  const SolverOptions& opt = options.solver;
  const Run hi = picard(next_q, 1.0 - opt.start_offset, opt);
  if (!hi.converged)
    throw SolverFailure("overlap fixed point did not converge from the high start", hi.q, hi.residual, hi.iterations);
  const Run lo = picard(next_q, opt.start_offset, opt);
  if (!lo.converged)
    throw SolverFailure("overlap fixed point did not converge from the low start", lo.q, lo.residual, lo.iterations);

  OverlapSolution out;
  out.q = std::clamp(hi.q, 0.0, 1.0);
  out.qtilde = qtilde_of_q(out.q);
  out.mse = std::clamp(1.0 - out.q, 0.0, 1.0);
  out.iterations = hi.iterations + lo.iterations;
  out.residual = std::max(hi.residual, lo.residual);
  out.low_branch_q = lo.q;
  out.multistable = std::abs(hi.q - lo.q) > opt.multistable_gap;
  return out;
}

OverlapSolution solve_overlap(double load, double power, const QuantizerSpec& normalized_quantizer,
                              const ScalarPrior& prior, const NumericsOptions& options) {
  if (!(load >= 0.0)) throw std::invalid_argument("solve_overlap: load must be nonnegative");
  if (!(power >= 0.0 && power <= 1.0)) throw std::invalid_argument("solve_overlap: power must lie in [0, 1]");
  if (load == 0.0 || power == 0.0) return OverlapSolution{};
  if (std::isinf(load)) {
    OverlapSolution out;
    out.q = 1.0;
    out.qtilde = kInf;
    out.mse = 0.0;
    out.low_branch_q = 1.0;
    return out;
  }
  if (normalized_quantizer.is_linear() && prior.is_gaussian()) {
    // Closed form; Picard iteration converges only sublinearly at power = 1.
    OverlapSolution out;
    out.mse = linear_gaussian_mse(load, power);
    out.q = 1.0 - out.mse;
    out.qtilde = out.mse > 0.0 ? 1.0 / out.mse - 1.0 : kInf;
    out.low_branch_q = out.q;
    return out;
  }
  const auto map = [&](double q) { return normalized_qtilde(load, power, q, normalized_quantizer, options.quadrature); };
  return solve_overlap_map(map, prior, options);
}

// ---------------------------------------------------------------------------

double SystemConfig::training_load() const {
  if (tau.has_value() == tau_prime.has_value())
    throw std::invalid_argument("exactly one of tau and tau_prime must be set");
  if (tau) {
    if (!(*tau > 0.0 && *tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
    return *tau * beta;
  }
  if (!(*tau_prime >= 0.0)) throw std::invalid_argument("tau_prime must be nonnegative");
  return *tau_prime;
}

void SystemConfig::validate() const {
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be positive and finite");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive and finite");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
  if (step && !(*step > 0.0 && std::isfinite(*step))) throw std::invalid_argument("step must be positive");
  if (step && adc.is_infinite()) throw std::invalid_argument("step given for an infinite-resolution quantizer");
  if (step && std::isinf(rho)) throw std::invalid_argument("explicit step requires finite rho");
  if (!dac.is_infinite() && dac.bits() > kMaxDiscreteBits)
    throw std::invalid_argument("input resolution above " + std::to_string(kMaxDiscreteBits) + " bits");
  training_load();
}

QuantizerSpec SystemConfig::quantizer() const {
  if (adc.is_infinite()) return QuantizerSpec::linear();
  if (std::isinf(rho)) throw std::invalid_argument("absolute quantizer undefined for infinite rho");
  if (step) return QuantizerSpec::uniform(adc.bits(), *step);
  return QuantizerSpec::calibrated(adc, rho);
}

NormalizedSystem normalize(double rho, double sigma2, Resolution adc, std::optional<double> step) {
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  NormalizedSystem out;
  if (std::isinf(rho)) {
    if (step) throw std::invalid_argument("explicit step requires finite rho");
    out.signal = 1.0;
    out.noise = 0.0;
    out.scale = kInf;
    // Calibrated step at rho -> inf: coefficient * sqrt((1 + rho) / (rho + sigma2)) -> coefficient.
    out.quantizer = adc.is_infinite() ? QuantizerSpec::linear()
                                      : QuantizerSpec::uniform(adc.bits(), step_coefficient(adc.bits()));
    return out;
  }
  out.scale = rho + sigma2;
  out.signal = rho / out.scale;
  out.noise = sigma2 / out.scale;
  if (adc.is_infinite()) {
    if (step) throw std::invalid_argument("step given for an infinite-resolution quantizer");
    out.quantizer = QuantizerSpec::linear();
  } else {
    const double raw = step ? *step : calibrate_step(adc.bits(), rho);
    out.quantizer = QuantizerSpec::uniform(adc.bits(), raw / std::sqrt(out.scale));
  }
  return out;
}

NormalizedSystem normalize(const SystemConfig& cfg) { return normalize(cfg.rho, cfg.sigma2, cfg.adc, cfg.step); }

TrainingSolution solve_training_normalized(double load, const NormalizedSystem& sys, const ScalarPrior& channel_prior,
                                           const NumericsOptions& options) {
  const OverlapSolution s = solve_overlap(load, sys.signal, sys.quantizer, channel_prior, options);
  return {s.q, s.qtilde, s.mse, s.iterations, s.residual, s.multistable};
}

TrainingSolution solve_training_fixed_point(const SystemConfig& cfg, const NumericsOptions& options) {
  cfg.validate();
  return solve_training_normalized(cfg.training_load(), normalize(cfg), cfg.channel_prior, options);
}

EquivalentSystem equivalent_system(double rho, double sigma2, double mse_g) {
  if (!(mse_g >= 0.0 && mse_g <= 1.0)) throw std::invalid_argument("mse_g must lie in [0, 1]");
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
  const double rho_bar = mse_g == 1.0 ? 0.0 : rho * (1.0 - mse_g);
  const double sigma2_bar = mse_g == 0.0 ? sigma2 : sigma2 + rho * mse_g;
  return {rho_bar, sigma2_bar};
}

DataSolution solve_data_fixed_point(double rho_bar, double sigma2_bar, double alpha, const QuantizerSpec& quantizer,
                                    const ScalarPrior& input_prior, const NumericsOptions& options) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(rho_bar >= 0.0) || !std::isfinite(rho_bar)) throw std::invalid_argument("rho_bar must be finite and >= 0");
  if (!(sigma2_bar > 0.0)) throw std::invalid_argument("sigma2_bar must be positive");
  const double scale = rho_bar + sigma2_bar;
  const QuantizerSpec qn = quantizer.is_linear() ? quantizer : quantizer.scaled(1.0 / std::sqrt(scale));
  const OverlapSolution s = solve_overlap(alpha, rho_bar / scale, qn, input_prior, options);
  return {s.q, s.qtilde, s.mse, s.iterations, s.residual, s.multistable};
}

KnownChannelInfo known_channel_info(double power, double alpha, const QuantizerSpec& normalized_quantizer,
                                    const ScalarPrior& input_prior, const NumericsOptions& options) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  KnownChannelInfo out;
  out.data = solve_overlap(alpha, power, normalized_quantizer, input_prior, options);
  const double q = out.data.q;
  const double qt = out.data.qtilde;
  const double s_uncond = 1.0 - power * q;
  const double s_cond = 1.0 - power;

  double h_first, h_cond;
  if (normalized_quantizer.is_linear()) {
    h_cond = s_cond > 0.0 ? std::log2(std::numbers::pi * std::numbers::e * s_cond) : -kInf;
    h_first = s_uncond > 0.0 ? std::log2(std::numbers::pi * std::numbers::e * s_uncond) : -kInf;
  } else {
    // Noiseless finite-resolution output is deterministic given the input.
    h_cond = s_cond > 0.0 ? hbar(power, s_cond, normalized_quantizer, options.quadrature) : 0.0;
    h_first = s_uncond > 0.0 ? hbar(power * q, s_uncond, normalized_quantizer, options.quadrature) : 0.0;
  }
  double entropy_gap;
  if (s_uncond <= 0.0 && s_cond <= 0.0) {
    entropy_gap = 0.0;  // both entropies collapse together; their difference vanishes in the limit
  } else if (normalized_quantizer.is_linear()) {
    entropy_gap = s_cond > 0.0 ? std::log2(s_uncond / s_cond) : kInf;
  } else {
    entropy_gap = h_first - h_cond;
  }
  const double penalty = (out.data.mse == 0.0 || qt == 0.0) ? 0.0 : out.data.mse * qt / kLn2;
  const double scalar_term = (mutual_info_awgn(qt, input_prior, options.awgn) - penalty) / alpha;
  out.mutual_info = entropy_gap + scalar_term;
  out.h_cond = h_cond;
  out.h_uncond = h_first + scalar_term;
  return out;
}

Analysis analyze(const SystemConfig& cfg, const NumericsOptions& options, std::optional<double> mse_g_override) {
  cfg.validate();
  const NormalizedSystem sys = normalize(cfg);
  Analysis out;
  FixedPointSolution& fp = out.fixed_point;
  if (mse_g_override) {
    if (!(*mse_g_override >= 0.0 && *mse_g_override <= 1.0)) throw std::invalid_argument("mse_g must lie in [0, 1]");
    fp.mse_g = *mse_g_override;
    fp.q_g = 1.0 - fp.mse_g;
    fp.qtilde_g = kInf;
    if (fp.mse_g > 0.0 && cfg.channel_prior.is_gaussian()) fp.qtilde_g = 1.0 / fp.mse_g - 1.0;
  } else {
    const TrainingSolution t = solve_training_normalized(cfg.training_load(), sys, cfg.channel_prior, options);
    fp.q_g = t.q_g;
    fp.qtilde_g = t.qtilde_g;
    fp.mse_g = t.mse_g;
    fp.iterations = t.iterations;
    fp.residual = t.residual;
    fp.multistable = t.multistable;
  }
  const EquivalentSystem eq = equivalent_system(cfg.rho, cfg.sigma2, fp.mse_g);
  fp.rho_bar = eq.rho_bar;
  fp.sigma2_bar = eq.sigma2_bar;

  const double power = sys.signal * (1.0 - fp.mse_g);
  const KnownChannelInfo info = known_channel_info(power, cfg.alpha, sys.quantizer, cfg.input_prior(), options);
  fp.q_x = info.data.q;
  fp.qtilde_x = info.data.qtilde;
  fp.mse_x = info.data.mse;
  fp.iterations += info.data.iterations;
  fp.residual = std::max(fp.residual, info.data.residual);
  fp.multistable = fp.multistable || info.data.multistable;

  out.mutual_info = info.mutual_info;
  // Linear-receiver entropies are relative to the normalization; restore absolute units.
  const double shift = sys.quantizer.is_linear() && std::isfinite(sys.scale) ? std::log2(sys.scale) : 0.0;
  out.h_cond = info.h_cond + shift;
  out.h_uncond = info.h_uncond + shift;
  return out;
}

double mutual_info_unknown_channel(const SystemConfig& cfg, const NumericsOptions& options) {
  cfg.validate();
  if (std::isinf(cfg.rho)) throw std::invalid_argument("unknown-channel evaluation needs finite rho");
  const TrainingSolution t = solve_training_fixed_point(cfg, options);
  const QuantizerSpec quant = cfg.quantizer();
  const double rho = cfg.rho;
  const double total = cfg.sigma2 + rho;
  const double qg = t.q_g;
  const ScalarPrior prior = cfg.input_prior();

  // Data overlap in absolute units with the estimated-channel parameters.
  const auto map = [&](double q) {
    if (qg == 0.0) return 0.0;
    return cfg.alpha * rho * qg * chi(rho * qg * q, total - rho * qg * q, quant, options.quadrature);
  };
  OverlapSolution d;
  if (qg == 0.0 || rho == 0.0) {
    d = OverlapSolution{};
  } else {
    d = solve_overlap_map(map, prior, options);
  }
  const double h1 = hbar(rho * qg * d.q, total - rho * qg * d.q, quant, options.quadrature);
  const double h2 = hbar(rho * qg, total - rho * qg, quant, options.quadrature);
  const double penalty = (d.mse == 0.0 || d.qtilde == 0.0) ? 0.0 : d.mse * d.qtilde / kLn2;
  return h1 - h2 + (mutual_info_awgn(d.qtilde, prior, options.awgn) - penalty) / cfg.alpha;
}

}  // namespace qlst
