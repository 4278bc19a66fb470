#include "qlst/special.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

using namespace qlst;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// exp(x^2) erfc(x), mpmath at 30 digits.
struct Ref {
  double x, value;
};
const Ref kErfcx[] = {
    {-3.0, 16205.988853999586625},   {-0.5, 1.9523604891825570933},     {0.0, 1.0},
    {0.3, 0.73459933456765514992},   {1.0, 0.42758357615580700441},     {2.5, 0.21080636406114358065},
    {4.0, 0.13699945762506138989},   {5.0, 0.11070463773306862637},     {7.5, 0.074573693062876683005},
    {10.0, 0.056140992743822585858}, {30.0, 0.018795888861416751497},   {1000.0, 0.0005641893014533876542},
};
}  // namespace

TEST_SUITE("special") {
  TEST_CASE("erfcx against high-precision values") {
    for (const Ref& r : kErfcx) {
      CAPTURE(r.x);
      CHECK(erfcx(r.x) == doctest::Approx(r.value).epsilon(1e-13));
      CHECK(erfcx_accurate(r.x) == doctest::Approx(r.value).epsilon(1e-13));
    }
    CHECK(erfcx(kInf) == 0.0);
    CHECK(std::isnan(erfcx(std::numeric_limits<double>::quiet_NaN())));
  }

  TEST_CASE("erfcx expansion matches the accurate path on a dense grid") {
    double worst = 0.0;
    for (double x = 0.0; x < 60.0; x += 0.0137) worst = std::max(worst, std::abs(erfcx(x) / erfcx_accurate(x) - 1.0));
    CHECK(worst < 1e-14);
  }

  TEST_CASE("erfcx tail follows the asymptotic series") {
    // 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6))
    for (double x : {200.0, 1e4, 1e7}) {
      const double u = 1.0 / (2.0 * x * x);
      const double series = (1.0 - u + 3.0 * u * u - 15.0 * u * u * u) / (x * std::sqrt(M_PI));
      CHECK(erfcx(x) == doctest::Approx(series).epsilon(1e-14));
    }
  }

  TEST_CASE("normal quantile inverts the cdf") {
    for (double p : {1e-300, 1e-12, 0.01, 0.25, 0.5, 0.75, 0.99}) {
      CAPTURE(p);
      CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(normal_quantile(0.75) == doctest::Approx(0.67448975019608174320).epsilon(1e-14));
  }

  TEST_CASE("mills ratio equals sf/pdf") {
    for (double x : {-2.0, 0.0, 1.0, 6.0, 20.0}) {
      CAPTURE(x);
      CHECK(mills_ratio(x) == doctest::Approx(normal_sf(x) / normal_pdf(x)).epsilon(1e-12));
    }
  }

  TEST_CASE("normal interval keeps tail precision") {
    // Phi(-30) - Phi(-31) ~ Phi(-30) to 13 orders.
    const double tail = normal_interval(30.0, 31.0);
    CHECK(tail == doctest::Approx(0.5 * std::erfc(30.0 / std::sqrt(2.0)) - 0.5 * std::erfc(31.0 / std::sqrt(2.0)))
                      .epsilon(1e-12));
    CHECK(normal_interval(-kInf, kInf) == doctest::Approx(1.0));
    CHECK(normal_interval(-1.0, 1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-15));
  }
}
