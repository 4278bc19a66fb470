#pragma once

#include <cmath>
#include <numbers>

namespace qlst {

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLn2 = std::numbers::ln2;

/// Scaled complementary error function exp(x^2) * erfc(x), finite for all x
/// where the result is representable.
double erfcx(double x);

/// erfcx on [0, inf) as (1/sqrt(pi) + g(Z) / (L + x)) / (L + x) with
/// Z = (L - x) / (L + x) and g a Chebyshev series in Z. Relative error is a
/// few ulp over the whole half line.
struct ErfcxExpansion {
  static constexpr int kTerms = 20;
  static constexpr double kL = 4.0;
  double coef[kTerms];
};

const ErfcxExpansion& erfcx_expansion();

/// Branch-free evaluation for finite x >= 0.
inline double erfcx_nonnegative(const ErfcxExpansion& e, double x) {
  const double d = 1.0 / (ErfcxExpansion::kL + x);
  const double z = (ErfcxExpansion::kL - x) * d;
  double b1 = 0.0, b2 = 0.0;
#pragma GCC unroll 32
  for (int n = ErfcxExpansion::kTerms - 1; n >= 1; --n) {
    const double b0 = 2.0 * z * b1 - b2 + e.coef[n];
    b2 = b1;
    b1 = b0;
  }
  const double g = z * b1 - b2 + e.coef[0];
  return (0.564189583547756286948079451561 + g * d) * d;
}

/// Same function from erfc and a continued fraction; slower, used to build
/// and check the expansion behind erfcx.
double erfcx_accurate(double x);

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Phi(x), the standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// Q(x) = 1 - Phi(x), accurate deep into the upper tail.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

/// Q(x) / phi(x). Stays finite where both factors underflow.
double mills_ratio(double x);

/// Phi^{-1}(p) for p in (0, 1).
double normal_quantile(double p);

/// Phi(hi) - Phi(lo) for lo <= hi, evaluated on the side of zero that avoids
/// cancellation. Either bound may be infinite.
double normal_interval(double lo, double hi);

/// x * log2(x) with 0 log 0 := 0.
inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace qlst
