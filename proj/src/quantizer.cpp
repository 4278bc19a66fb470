#include "qlst/quantizer.hpp"

#include "qlst/special.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qlst {

namespace {

constexpr int kMaxBits = 16;

void check_variance(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("quantizer kernel: variance s must be positive");
}

void check_level(int k, const QuantizerSpec& spec) {
  if (spec.is_linear()) throw std::invalid_argument("quantizer kernel: undefined for a linear quantizer");
  if (k < 1 || k > spec.levels()) throw std::invalid_argument("quantizer kernel: level index out of range");
}

}  // namespace

Resolution Resolution::finite(int bits) {
  if (bits < 1 || bits > kMaxBits) throw std::invalid_argument("resolution: bits must lie in [1, 16]");
  return Resolution(bits);
}

Resolution Resolution::parse(std::string_view text) {
  if (text == "inf" || text == "infinite" || text == "INF" || text == "Inf") return infinite();
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("resolution: expected a positive integer or \"inf\", got \"" + std::string(text) + "\"");
  return finite(value);
}

int Resolution::bits() const {
  if (is_infinite()) throw std::invalid_argument("resolution: infinite resolution has no bit count");
  return bits_;
}

std::string Resolution::to_string() const { return is_infinite() ? "inf" : std::to_string(bits_); }

QuantizerSpec QuantizerSpec::linear() { return QuantizerSpec(); }

QuantizerSpec QuantizerSpec::uniform(int bits, double step) {
  if (bits < 1 || bits > kMaxBits) throw std::invalid_argument("quantizer: bits must lie in [1, 16]");
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("quantizer: step must be positive and finite");
  QuantizerSpec spec;
  spec.bits_ = bits;
  spec.step_ = step;
  const int half = 1 << (bits - 1);
  const int levels = 1 << bits;
  spec.thresholds_.reserve(levels - 1);
  for (int k = 1; k < levels; ++k) spec.thresholds_.push_back(static_cast<double>(k - half) * step);
  return spec;
}

QuantizerSpec QuantizerSpec::calibrated(Resolution resolution, double rho) {
  if (resolution.is_infinite()) return linear();
  return uniform(resolution.bits(), calibrate_step(resolution.bits(), rho));
}

Resolution QuantizerSpec::resolution() const {
  return is_linear() ? Resolution::infinite() : Resolution::finite(bits_);
}

int QuantizerSpec::bits() const {
  if (is_linear()) throw std::invalid_argument("quantizer: linear quantizer has no bit count");
  return bits_;
}

double QuantizerSpec::step() const {
  if (is_linear()) throw std::invalid_argument("quantizer: linear quantizer has no step");
  return step_;
}

double QuantizerSpec::threshold(int k) const {
  if (k <= 0) return -std::numeric_limits<double>::infinity();
  if (k >= levels()) return std::numeric_limits<double>::infinity();
  return thresholds_[k - 1];
}

QuantizerSpec QuantizerSpec::scaled(double factor) const {
  if (is_linear()) return *this;
  return uniform(bits_, step_ * factor);
}

double step_coefficient(int bits) {
  if (bits < 1 || bits > kMaxBits) throw std::invalid_argument("calibrate_step: bits must lie in [1, 16]");
  if (bits == 1) return 1.0;
  // P(w > r_{2^b - 1}) = 2^-b with r_{2^b - 1} = (2^{b-1} - 1) * step, w ~ N(0, (1 + rho)/2).
  const double tail = std::ldexp(1.0, -bits);
  const double edge = normal_quantile(1.0 - tail) / kSqrt2;
  return edge / static_cast<double>((1 << (bits - 1)) - 1);
}

double calibrate_step(int bits, double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw std::invalid_argument("calibrate_step: rho must be finite and >= 0");
  if (bits == 1) return 1.0;
  return step_coefficient(bits) * std::sqrt(1.0 + rho);
}

int quantize_level(double w, const QuantizerSpec& spec) {
  if (spec.is_linear()) throw std::invalid_argument("quantize_level: linear quantizer has no levels");
  const int levels = spec.levels();
  const double guess = std::ceil(w / spec.step() + 0.5 * levels);
  int k = guess < 1.0 ? 1 : guess > levels ? levels : static_cast<int>(guess);
  while (k > 1 && w <= spec.threshold(k - 1)) --k;
  while (k < levels && w > spec.threshold(k)) ++k;
  return k;
}

double quantize(double w, const QuantizerSpec& spec) {
  if (spec.is_linear()) return w;
  return static_cast<double>(quantize_level(w, spec));
}

double psi(int k, double w, double s, const QuantizerSpec& spec) {
  check_level(k, spec);
  check_variance(s);
  const double sd = std::sqrt(s);
  return normal_interval((kSqrt2 * spec.threshold(k - 1) - w) / sd, (kSqrt2 * spec.threshold(k) - w) / sd);
}

double psi_prime(int k, double w, double s, const QuantizerSpec& spec) {
  check_level(k, spec);
  check_variance(s);
  const auto gauss = [&](double r) {
    if (std::isinf(r)) return 0.0;
    const double d = kSqrt2 * r - w;
    return std::exp(-d * d / (2.0 * s));
  };
  return (gauss(spec.threshold(k)) - gauss(spec.threshold(k - 1))) / std::sqrt(2.0 * std::numbers::pi * s);
}

void level_kernels(double w, double s, const QuantizerSpec& spec, std::span<double> psi_out,
                   std::span<double> psi_prime_out) {
  const int levels = spec.levels();
  const double inv_sd = 1.0 / std::sqrt(s);
  // Per threshold: the smaller of Phi(a) and Q(a), which side it is, and phi(a)/sqrt(s).
  double prev_tail = 0.0;
  bool prev_upper = false;  // r_0 = -inf: Phi = 0 stored as a lower tail
  double prev_density = 0.0;
  for (int k = 1; k <= levels; ++k) {
    double tail = 0.0;
    bool upper = true;  // r_{2^b} = +inf: Q = 0
    double density = 0.0;
    if (k < levels) {
      const double a = (kSqrt2 * spec.thresholds()[k - 1] - w) * inv_sd;
      upper = a >= 0.0;
      tail = upper ? normal_sf(a) : normal_cdf(a);
      density = normal_pdf(a) * inv_sd;
    }
    double p;
    if (prev_upper) {
      p = prev_tail - (upper ? tail : 1.0 - tail);
    } else if (!upper) {
      p = tail - prev_tail;
    } else {
      p = 1.0 - tail - prev_tail;
    }
    psi_out[k - 1] = p < 0.0 ? 0.0 : p;
    psi_prime_out[k - 1] = density - prev_density;
    prev_tail = tail;
    prev_upper = upper;
    prev_density = density;
  }
}

}  // namespace qlst
