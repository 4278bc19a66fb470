#include "qlst/quantizer.hpp"
#include "qlst/special.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

using namespace qlst;

TEST_SUITE("quantizer") {
  TEST_CASE("resolution parsing") {
    CHECK(Resolution::parse("inf").is_infinite());
    CHECK(Resolution::parse("3").bits() == 3);
    CHECK_THROWS(Resolution::parse("0"));
    CHECK_THROWS(Resolution::parse("two"));
    CHECK_THROWS(Resolution::finite(0));
  }

  TEST_CASE("step coefficient equals sqrt(1/2) Phi^-1(1 - 2^-b) / (2^{b-1} - 1)") {
    // mpmath, 30 digits
    CHECK(step_coefficient(2) == doctest::Approx(0.47693627620446987338).epsilon(1e-14));
    CHECK(step_coefficient(3) == doctest::Approx(0.27113994919920618056).epsilon(1e-14));
    for (double rho : {0.0, 1.0, 10.0, 1000.0})
      CHECK(calibrate_step(3, rho) == doctest::Approx(step_coefficient(3) * std::sqrt(1.0 + rho)).epsilon(1e-15));
  }

  TEST_CASE("calibrated step puts probability 2^-b on each extreme level") {
    for (int b : {2, 3, 4}) {
      const double rho = 7.0;
      const double sd = std::sqrt((1.0 + rho) / 2.0);
      const QuantizerSpec q = QuantizerSpec::uniform(b, calibrate_step(b, rho));
      const double top = q.thresholds().back();
      CHECK(normal_sf(top / sd) == doctest::Approx(std::ldexp(1.0, -b)).epsilon(1e-12));
    }
  }

  TEST_CASE("thresholds and level mapping") {
    const QuantizerSpec q = QuantizerSpec::uniform(2, 0.5);
    REQUIRE(q.levels() == 4);
    CHECK(q.thresholds()[0] == -0.5);
    CHECK(q.thresholds()[1] == 0.0);
    CHECK(q.thresholds()[2] == 0.5);
    CHECK(q.threshold(0) == -std::numeric_limits<double>::infinity());
    CHECK(quantize_level(-10.0, q) == 1);
    CHECK(quantize_level(-0.5, q) == 1);  // (r_{k-1}, r_k]
    CHECK(quantize_level(0.2, q) == 3);
    CHECK(quantize_level(3.0, q) == 4);
    CHECK(quantize(1.7, QuantizerSpec::linear()) == 1.7);
    CHECK(q.scaled(2.0).step() == 1.0);
  }

  TEST_CASE("kernels telescope to one and psi_prime is -d psi / dw") {
    const QuantizerSpec q = QuantizerSpec::uniform(3, 0.4);
    for (double w : {-3.0, -0.1, 0.0, 0.7, 2.5}) {
      for (double s : {0.01, 0.5, 2.0}) {
        double sum = 0.0;
        for (int k = 1; k <= q.levels(); ++k) sum += psi(k, w, s, q);
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (int k = 1; k <= q.levels(); ++k) {
          const double h = 1e-6 * std::sqrt(s);
          const double fd = -(psi(k, w + h, s, q) - psi(k, w - h, s, q)) / (2.0 * h);
          CHECK(psi_prime(k, w, s, q) == doctest::Approx(fd).epsilon(1e-6).scale(0.1));
        }
        std::vector<double> p(q.levels()), dp(q.levels());
        level_kernels(w, s, q, p, dp);
        // Tails near 1e-200 carry ~2 x^2 eps of argument rounding (x ~ 30).
        for (int k = 1; k <= q.levels(); ++k) {
          CHECK(p[k - 1] == doctest::Approx(psi(k, w, s, q)).epsilon(1e-12).scale(1e-300));
          CHECK(dp[k - 1] == doctest::Approx(psi_prime(k, w, s, q)).epsilon(1e-12).scale(1e-300));
        }
      }
    }
  }
}
