#include "qlst/gamp_sim.hpp"

#include "qlst/parallel.hpp"

#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace qlst {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Scaled {
  double signal;  // rho / (rho + 1)
  double noise;   // 1 / (rho + 1)
  QuantizerSpec quantizer;
};

Scaled scaled_system(const TrialConfig& cfg) {
  const NormalizedSystem n = normalize(cfg.rho, 1.0, cfg.adc, cfg.step);
  return {n.signal, n.noise, n.quantizer};
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  // CN(0, var)
  std::complex<double> complex_normal(double var) {
    const double sd = std::sqrt(0.5 * var);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {sd * re, sd * im};
  }

  double component(const ScalarPrior& prior) {
    if (prior.is_gaussian()) return std::sqrt(0.5) * normal_(engine_);
    const auto pts = prior.points();
    return pts[engine_() % pts.size()];
  }

  std::complex<double> symbol(const ScalarPrior& prior) {
    const double re = component(prior);
    const double im = component(prior);
    return {re, im};
  }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

void quantize_matrix(const Eigen::MatrixXcd& w, const QuantizerSpec& q, GampObservations& obs) {
  if (q.is_linear()) {
    obs.values = w;
    return;
  }
  obs.re_levels.resize(w.rows(), w.cols());
  obs.im_levels.resize(w.rows(), w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      obs.re_levels(i, j) = quantize_level(w(i, j).real(), q);
      obs.im_levels(i, j) = quantize_level(w(i, j).imag(), q);
    }
}

double nearest_point(double v, const ScalarPrior& prior) {
  const auto pts = prior.points();
  double best = pts[0];
  for (double p : pts)
    if (std::abs(v - p) < std::abs(v - best)) best = p;
  return best;
}

}  // namespace

int TrialConfig::receivers() const { return static_cast<int>(std::lround(alpha * transmitters)); }
int TrialConfig::training_length() const { return static_cast<int>(std::lround(tau_prime * transmitters)); }

void TrialConfig::validate() const {
  if (transmitters < 1) throw std::invalid_argument("transmitters must be at least 1");
  if (!(alpha > 0.0) || receivers() < 1) throw std::invalid_argument("alpha too small: no receivers");
  if (!(tau_prime > 0.0) || training_length() < 1) throw std::invalid_argument("tau_prime too small: no training");
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
  if (dac.is_infinite()) throw std::invalid_argument("simulation needs a discrete input (finite DAC resolution)");
  if (dac.bits() > kMaxDiscreteBits) throw std::invalid_argument("input resolution too large");
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(trial_index + 0x632be59bd9b4e019ULL));
}

double theory_channel_mse(const TrialConfig& cfg, const NumericsOptions& numerics) {
  const NormalizedSystem n = normalize(cfg.rho, 1.0, cfg.adc, cfg.step);
  return solve_training_normalized(cfg.tau_prime, n, ScalarPrior::gaussian(), numerics).mse_g;
}

TrialResult gamp2_trial(const TrialConfig& cfg, double mse_g, std::uint64_t seed) {
  cfg.validate();
  const int M = cfg.transmitters;
  const int K = cfg.receivers();
  const int T = cfg.training_length();
  const Scaled sys = scaled_system(cfg);
  const ScalarPrior input = ScalarPrior::from_resolution(cfg.dac);
  const double scale = std::sqrt(sys.signal / M);
  Sampler rng(seed);

  Eigen::MatrixXcd G(K, M);
  for (Eigen::Index j = 0; j < M; ++j)
    for (Eigen::Index i = 0; i < K; ++i) G(i, j) = rng.complex_normal(1.0);
  Eigen::MatrixXcd Xt(M, T);
  for (Eigen::Index j = 0; j < T; ++j)
    for (Eigen::Index i = 0; i < M; ++i) Xt(i, j) = rng.symbol(input);
  Eigen::MatrixXcd Wt = scale * (G * Xt);
  for (Eigen::Index j = 0; j < T; ++j)
    for (Eigen::Index i = 0; i < K; ++i) Wt(i, j) += rng.complex_normal(sys.noise);
  Eigen::VectorXcd x(M);
  for (Eigen::Index i = 0; i < M; ++i) x(i) = rng.symbol(input);
  Eigen::VectorXcd w = scale * (G * x);
  for (Eigen::Index i = 0; i < K; ++i) w(i) += rng.complex_normal(sys.noise);

  TrialResult out;
  // Channel estimation: every row of G is an independent problem sharing the
  // measurement matrix Xt^T.
  const Eigen::MatrixXcd A = Xt.transpose();
  const double train_power = A.squaredNorm() / static_cast<double>(A.size());
  Eigen::MatrixXcd G_hat;
  if (sys.quantizer.is_linear()) {
    // Gaussian prior and output: the message-passing fixed point is the
    // linear MMSE estimate, computed directly.
    const Eigen::MatrixXcd Yt = Wt.transpose();
    if (sys.noise > 0.0) {
      Eigen::MatrixXcd H = scale * scale * (A.adjoint() * A);
      H.diagonal().array() += sys.noise;
      G_hat = H.llt().solve(scale * (A.adjoint() * Yt)).transpose();
    } else if (T >= M) {
      G_hat = ((A.adjoint() * A).llt().solve(A.adjoint() * Yt) / scale).transpose();
    } else {
      G_hat = (A.adjoint() * (A * A.adjoint()).llt().solve(Yt) / scale).transpose();
    }
  } else {
    GampObservations obs;
    quantize_matrix(Wt.transpose(), sys.quantizer, obs);
    GampProblem prob;
    prob.matrix = &A;
    prob.scale = scale;
    prob.entry_power = train_power;
    prob.quantizer = sys.quantizer;
    prob.noise_var = sys.noise;
    prob.prior = ScalarPrior::gaussian();
    const GampResult est = gamp_solve(prob, obs, cfg.gamp);
    G_hat = est.mean.transpose();
    out.training_iterations = est.iterations;
  }
  out.channel_mse = (G_hat - G).squaredNorm() / static_cast<double>(G.size());

  // Detection on the estimated channel with the equivalent-system variances.
  const double m = cfg.empirical_mse ? std::clamp(out.channel_mse, 0.0, 1.0) : mse_g;
  GampObservations obs;
  quantize_matrix(w, sys.quantizer, obs);
  GampProblem prob;
  prob.matrix = &G_hat;
  prob.scale = scale;
  prob.entry_power = 1.0 - m;
  prob.quantizer = sys.quantizer;
  prob.noise_var = sys.noise + sys.signal * m;
  prob.prior = input;
  const GampResult det = gamp_solve(prob, obs, cfg.gamp);
  out.detection_iterations = det.iterations;
  for (Eigen::Index i = 0; i < M; ++i) {
    const std::complex<double> v = det.mean(i, 0);
    const bool wrong = nearest_point(v.real(), input) != x(i).real() || nearest_point(v.imag(), input) != x(i).imag();
    out.symbol_errors += wrong ? 1 : 0;
  }
  out.symbols = M;
  return out;
}

McResult monte_carlo_ser(const TrialConfig& cfg, int n_trials, std::uint64_t base_seed, int threads,
                         const NumericsOptions& numerics) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
  cfg.validate();
  const double mse_g = theory_channel_mse(cfg, numerics);
  std::vector<TrialResult> results(n_trials);
  std::vector<char> diverged(n_trials, 0);
  parallel_for(static_cast<std::size_t>(n_trials), threads, [&](std::size_t t) {
    try {
      results[t] = gamp2_trial(cfg, mse_g, trial_seed(base_seed, t));
    } catch (const GampDiverged&) {
      diverged[t] = 1;
    }
  });
  McResult out;
  out.n_trials = n_trials;
  out.mse_g = mse_g;
  double mse_sum = 0.0;
  int ok = 0;
  for (int t = 0; t < n_trials; ++t) {
    if (diverged[t]) {
      ++out.diverged_trials;
      continue;
    }
    out.symbol_errors += results[t].symbol_errors;
    out.n_symbol_decisions += results[t].symbols;
    mse_sum += results[t].channel_mse;
    ++ok;
  }
  if (out.diverged_trials > 0.01 * n_trials) {
    std::ostringstream msg;
    msg << "monte carlo: " << out.diverged_trials << " of " << n_trials << " trials diverged";
    throw GampDiverged(msg.str());
  }
  out.mean_channel_mse = ok > 0 ? mse_sum / ok : 0.0;
  if (out.n_symbol_decisions > 0) {
    const double p = static_cast<double>(out.symbol_errors) / static_cast<double>(out.n_symbol_decisions);
    out.mean_ser = p;
    out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(out.n_symbol_decisions));
  }
  return out;
}

}  // namespace qlst
