#include "qlst/scalar_awgn.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>

using namespace qlst;

namespace {
// QPSK: 2 (1 - E log2(1 + exp(-2l - 2 sqrt(l) z))) and 1 - E tanh(l + sqrt(l) z), mpmath.
struct QpskRef {
  double lambda, info_bits, mmse;
};
const QpskRef kQpsk[] = {
    {0.5, 0.5809602267216961434, 0.64988659532486918568},
    {2.0, 1.4429031815807762587, 0.23101822192929561944},
    {8.0, 1.9809236442609038197, 0.0071762572181569118186},
};
}  // namespace

TEST_SUITE("scalar_awgn") {
  TEST_CASE("Gaussian prior closed forms") {
    for (double l : {0.1, 1.0, 10.0}) {
      CHECK(std::abs(mutual_info_awgn(l, ScalarPrior::gaussian()) - std::log2(1.0 + l)) < 1e-8);
      CHECK(std::abs(mmse_awgn(l, ScalarPrior::gaussian()) - 1.0 / (1.0 + l)) < 1e-8);
    }
  }

  TEST_CASE("forced quadrature reproduces the Gaussian closed forms") {
    AwgnOptions o;
    o.force_quadrature = true;
    for (double l : {0.1, 1.0, 10.0}) {
      CHECK(mutual_info_awgn(l, ScalarPrior::gaussian(), o) == doctest::Approx(std::log2(1.0 + l)).epsilon(1e-8));
      CHECK(mmse_awgn(l, ScalarPrior::gaussian(), o) == doctest::Approx(1.0 / (1.0 + l)).epsilon(1e-8));
    }
  }

  TEST_CASE("QPSK against high-precision integrals") {
    for (const QpskRef& r : kQpsk) {
      CAPTURE(r.lambda);
      CHECK(mutual_info_awgn(r.lambda, ScalarPrior::discrete(1)) == doctest::Approx(r.info_bits).epsilon(1e-9));
      CHECK(mmse_awgn(r.lambda, ScalarPrior::discrete(1)) == doctest::Approx(r.mmse).epsilon(1e-9));
    }
  }

  TEST_CASE("I-MMSE relation dI/dlambda = mmse / ln 2") {
    for (int a : {1, 2, 3}) {
      const ScalarPrior p = ScalarPrior::discrete(a);
      for (double l : {0.3, 3.0, 20.0}) {
        const double h = 1e-4 * l;
        const double d = (mutual_info_awgn(l + h, p) - mutual_info_awgn(l - h, p)) / (2.0 * h);
        CHECK(d == doctest::Approx(mmse_awgn(l, p) / std::log(2.0)).epsilon(1e-5));
      }
    }
  }

  TEST_CASE("limits and bounds") {
    const double inf = std::numeric_limits<double>::infinity();
    for (int a : {1, 2, 4}) {
      const ScalarPrior p = ScalarPrior::discrete(a);
      CHECK(p.complex_entropy_bits() == 2.0 * a);
      CHECK(mutual_info_awgn(0.0, p) == doctest::Approx(0.0));
      CHECK(mmse_awgn(0.0, p) == doctest::Approx(1.0));
      CHECK(mutual_info_awgn(inf, p) == doctest::Approx(2.0 * a));
      CHECK(mmse_awgn(inf, p) == 0.0);
      for (double l : {0.01, 1.0, 100.0}) {
        // Gaussian input is the worst case for MMSE and best for information.
        CHECK(mmse_awgn(l, p) <= 1.0 / (1.0 + l) + 1e-12);
        CHECK(mutual_info_awgn(l, p) <= std::log2(1.0 + l) + 1e-12);
      }
    }
    CHECK(ScalarPrior::discrete(1).points().size() == 2);
  }

  TEST_CASE("constellation has unit complex energy") {
    for (int a : {1, 2, 3}) {
      const ScalarPrior p = ScalarPrior::discrete(a);
      double e = 0.0;
      for (double x : p.points()) e += x * x;
      CHECK(2.0 * e / p.points().size() == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}
