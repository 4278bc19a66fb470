// Compiled with -ffast-math so the loop below vectorizes, including exp.
// Inputs are finite by contract; nothing here tests for inf or nan.
#include "qlst/gamp.hpp"
#include "qlst/special.hpp"

#include <cmath>
#include <cstddef>

namespace qlst {

void truncated_normal_moments_batch(std::size_t n, const double* lo, const double* hi, double* mean,
                                    double* variance) {
  const ErfcxExpansion& e = erfcx_expansion();
  constexpr double kSqrtHalfPi = 1.2533141373155002512078826424;
  for (std::size_t i = 0; i < n; ++i) {
    // Reflect so that b >= |a|.
    const bool flip = lo[i] + hi[i] < 0.0;
    const double a = flip ? -hi[i] : lo[i];
    const double b = flip ? -lo[i] : hi[i];
    const double abs_a = a < 0.0 ? -a : a;
    const double ma = kSqrtHalfPi * erfcx_nonnegative(e, abs_a * 0.7071067811865476);
    const double mb = kSqrtHalfPi * erfcx_nonnegative(e, b * 0.7071067811865476);
    const double r = std::exp(0.5 * (a - b) * (a + b));  // phi(b) / phi(a)
    double m, second;
    if (a >= 0.0) {
      // Upper tail, normalized by phi(a).
      const double iz = 1.0 / (ma - r * mb);
      m = (1.0 - r) * iz;
      second = 1.0 + (a - b * r) * iz;
    } else {
      const double pa = kInvSqrt2Pi * std::exp(-0.5 * a * a);
      const double pb = pa * r;
      const double iz = 1.0 / (1.0 - pa * ma - pb * mb);
      m = (pa - pb) * iz;
      second = 1.0 + (a * pa - b * pb) * iz;
    }
    mean[i] = flip ? -m : m;
    const double v = second - m * m;
    variance[i] = v > 0.0 ? v : 0.0;
  }
}

}  // namespace qlst
