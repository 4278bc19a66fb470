#include "qlst/scalar_awgn.hpp"

#include "qlst/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qlst {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("scalar AWGN: lambda must be >= 0");
}

// With y = sqrt(lambda) x + z / sqrt(2), the posterior switches between
// neighbouring points across their midpoint on a z-scale of
// 1 / (sqrt(2 lambda) d). Those crossings are the quadrature features.
std::vector<Feature> posterior_features(double lambda, const ScalarPrior& prior) {
  std::vector<Feature> features;
  const auto pts = prior.points();
  if (pts.size() < 2 || lambda <= 0.0) return features;
  const double root = std::sqrt(lambda);
  const double spacing = pts[1] - pts[0];
  const double width = 1.0 / (kSqrt2 * root * spacing);
  if (width >= 1.0) return features;
  for (double x : pts) {
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
      const double mid = 0.5 * (pts[j] + pts[j + 1]);
      const double center = kSqrt2 * root * (mid - x);
      if (std::abs(center) < 12.0) features.push_back({center, width});
    }
  }
  return features;
}

struct RealPosterior {
  double info_nats;
  double mmse;
};

// One pass over the rule yields both functionals; `want_info` skips the
// logarithms when only the MMSE is needed.
RealPosterior discrete_real_posterior(double lambda, const ScalarPrior& prior, const AwgnOptions& options,
                                      bool want_info) {
  const auto pts = prior.points();
  const std::size_t n = pts.size();
  const double root = std::sqrt(lambda);
  const double mass = 1.0 / static_cast<double>(n);
  const GaussianRule rule = GaussianRule::build(posterior_features(lambda, prior), options.quadrature);
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();

  std::vector<double> expo(n);
  double info = 0.0;
  double second_moment = 0.0;
  for (double x : pts) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double noise = nodes[i] / kSqrt2;
      // log p(y|x') - log p(y|x) = -(lambda (x - x')^2 + 2 sqrt(lambda) (x - x') noise)
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        const double d = x - pts[j];
        expo[j] = -(lambda * d * d + 2.0 * root * d * noise);
        top = std::max(top, expo[j]);
      }
      double num = 0.0;
      double den = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double e = std::exp(expo[j] - top);
        num += pts[j] * e;
        den += e;
      }
      const double m = num / den;
      second_moment += mass * weights[i] * m * m;
      if (want_info) info -= mass * weights[i] * (top + std::log(den * mass));
    }
  }
  return {std::max(info, 0.0), std::clamp(0.5 - second_moment, 0.0, 0.5)};
}

// Gaussian prior evaluated by the same quadrature path, used only to
// self-check the closed forms.
RealPosterior gaussian_real_posterior_numeric(double lambda, const AwgnOptions& options) {
  const GaussianRule rule = GaussianRule::build({}, options.quadrature);
  // y ~ N(0, (lambda + 1)/2); h(y) - h(y|x) in nats.
  const double var_y = 0.5 * (lambda + 1.0);
  const double log_density = rule.expect([&](double z) {
    const double y = std::sqrt(var_y) * z;
    return -0.5 * std::log(2.0 * std::numbers::pi * var_y) - y * y / (2.0 * var_y);
  });
  const double h_y = -log_density;
  const double h_noise = 0.5 * std::log(std::numbers::pi * std::numbers::e);
  // posterior mean of x given y is (sqrt(lambda)/(lambda + 1)) y
  const double gain = std::sqrt(lambda) / (lambda + 1.0);
  const double mean_sq = rule.expect([&](double z) {
    const double m = gain * std::sqrt(var_y) * z;
    return m * m;
  });
  return {h_y - h_noise, 0.5 - mean_sq};
}

}  // namespace

ScalarPrior ScalarPrior::gaussian() { return ScalarPrior(); }

ScalarPrior ScalarPrior::discrete(int bits) {
  if (bits < 1 || bits > kMaxDiscreteBits) throw std::invalid_argument("discrete prior: bits must lie in [1, 6]");
  ScalarPrior prior;
  prior.kind_ = Kind::Discrete;
  prior.bits_ = bits;
  const int n = 1 << bits;
  // PAM levels +-1, +-3, ... have variance (n^2 - 1)/3; scale to 1/2.
  const double scale = std::sqrt(1.5 / (static_cast<double>(n) * n - 1.0));
  for (int i = 0; i < n; ++i) prior.points_.push_back((2.0 * i - (n - 1)) * scale);
  return prior;
}

ScalarPrior ScalarPrior::from_resolution(Resolution dac) {
  return dac.is_infinite() ? gaussian() : discrete(dac.bits());
}

int ScalarPrior::bits() const {
  if (is_gaussian()) throw std::invalid_argument("gaussian prior has no bit count");
  return bits_;
}

double ScalarPrior::complex_entropy_bits() const {
  return is_gaussian() ? std::numeric_limits<double>::infinity() : 2.0 * bits_;
}

Resolution ScalarPrior::resolution() const {
  return is_gaussian() ? Resolution::infinite() : Resolution::finite(bits_);
}

double real_mutual_info_nats(double lambda, const ScalarPrior& prior, const AwgnOptions& options) {
  check_lambda(lambda);
  if (lambda == 0.0) return 0.0;
  if (prior.is_gaussian()) {
    if (std::isinf(lambda)) return std::numeric_limits<double>::infinity();
    if (options.force_quadrature) return gaussian_real_posterior_numeric(lambda, options).info_nats;
    return 0.5 * std::log1p(lambda);
  }
  if (std::isinf(lambda)) return std::log(static_cast<double>(prior.points().size()));
  return discrete_real_posterior(lambda, prior, options, true).info_nats;
}

double real_mmse(double lambda, const ScalarPrior& prior, const AwgnOptions& options) {
  check_lambda(lambda);
  if (lambda == 0.0) return 0.5;
  if (std::isinf(lambda)) return 0.0;
  if (prior.is_gaussian()) {
    if (options.force_quadrature) return gaussian_real_posterior_numeric(lambda, options).mmse;
    return 0.5 / (1.0 + lambda);
  }
  return discrete_real_posterior(lambda, prior, options, false).mmse;
}

double mutual_info_awgn(double lambda, const ScalarPrior& prior, const AwgnOptions& options) {
  return 2.0 * real_mutual_info_nats(lambda, prior, options) / kLn2;
}

double mmse_awgn(double lambda, const ScalarPrior& prior, const AwgnOptions& options) {
  return 2.0 * real_mmse(lambda, prior, options);
}

}  // namespace qlst
