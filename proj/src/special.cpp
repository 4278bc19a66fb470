#include "qlst/special.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qlst {

namespace {

constexpr double kInvSqrtPi = 0.564189583547756286948079451561;

// Continued fraction for erfc in the upper tail, evaluated bottom-up:
// erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
double erfcx_continued_fraction(double x) {
  constexpr int kTerms = 80;
  double tail = x;
  for (int n = kTerms; n >= 1; --n) tail = x + 0.5 * n / tail;
  return kInvSqrtPi / tail;
}

double erfcx_reference(double x) {
  if (x < 5.0) return std::exp(x * x) * std::erfc(x);
  return erfcx_continued_fraction(x);
}

}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    if (x < -26.6) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (std::isinf(x)) return 0.0;
  return erfcx_nonnegative(erfcx_expansion(), x);
}

const ErfcxExpansion& erfcx_expansion() {
  static const ErfcxExpansion e = [] {
    constexpr int n = ErfcxExpansion::kTerms;
    constexpr double L = ErfcxExpansion::kL;
    ErfcxExpansion out{};
    double f[n];
    for (int j = 0; j < n; ++j) {
      const double z = std::cos(std::numbers::pi * (j + 0.5) / n);
      const double x = L * (1.0 - z) / (1.0 + z);
      f[j] = ((L + x) * erfcx_reference(x) - kInvSqrtPi) * (L + x);
    }
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += f[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
      out.coef[k] = 2.0 * acc / n;
    }
    out.coef[0] *= 0.5;
    return out;
  }();
  return e;
}

double erfcx_accurate(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    if (x < -26.6) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x * x) - erfcx_accurate(-x);
  }
  if (std::isinf(x)) return 0.0;
  return erfcx_reference(x);
}

double mills_ratio(double x) {
  // Q(x)/phi(x) = sqrt(pi/2) * erfcx(x/sqrt(2))
  return 1.2533141373155002512078826424 * erfcx(x / kSqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_interval(double lo, double hi) {
  if (lo >= hi) return 0.0;
  if (lo >= 0.0) return normal_sf(lo) - normal_sf(hi);
  if (hi <= 0.0) return normal_cdf(hi) - normal_cdf(lo);
  return 1.0 - normal_sf(hi) - normal_cdf(lo);
}

}  // namespace qlst
