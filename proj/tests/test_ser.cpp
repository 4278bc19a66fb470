#include "qlst/ser.hpp"

#include "doctest.h"

#include <cmath>

using namespace qlst;

namespace {
double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }
}  // namespace

TEST_SUITE("ser") {
  TEST_CASE("QPSK error formula against std::erfc") {
    CHECK(ser_qpsk_theory(0.0) == doctest::Approx(0.75).epsilon(1e-15));
    for (double q : {0.1, 1.0, 4.0, 10.0, 30.0}) {
      const double p = q_function(std::sqrt(q));
      CHECK(ser_qpsk_theory(q) == doctest::Approx(2.0 * p - p * p).epsilon(1e-12));
    }
    CHECK(ser_qpsk_theory(1e4) == 0.0);
  }

  TEST_CASE("SER falls with training and with alpha") {
    const SerSystem sys{10.0, Resolution::finite(1), std::nullopt};
    double last = 1.0;
    for (double tp : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double s = ser_pipeline(sys, 10.0, tp).ser;
      CHECK(s < last);
      last = s;
    }
    last = 1.0;
    for (double a : {2.0, 5.0, 10.0, 20.0}) {
      const double s = ser_pipeline(sys, a, 2.0).ser;
      CHECK(s < last);
      last = s;
    }
  }

  TEST_CASE("pipeline reports the QPSK formula of its own qtilde") {
    const SerReport r = ser_pipeline({10.0, Resolution::finite(2), std::nullopt}, 8.0, 3.0);
    CHECK(r.ser == doctest::Approx(ser_qpsk_theory(r.qtilde_x)).epsilon(1e-12));
    CHECK(r.fixed_point.mse_g > 0.0);
    CHECK(r.fixed_point.mse_g < 1.0);
  }

  TEST_CASE("large-alpha approximation tracks the exact SER") {
    for (Resolution b : {Resolution::finite(1), Resolution::infinite()}) {
      const SerSystem sys{10.0, b, std::nullopt};
      const double exact = ser_pipeline(sys, 100.0, 2.0).ser;
      const double approx = ser_large_alpha(sys, 100.0, 2.0).ser;
      CHECK(approx == doctest::Approx(exact).epsilon(0.05));
    }
  }

  TEST_CASE("inverse searches hit the target") {
    const SerSystem sys{10.0, Resolution::finite(1), std::nullopt};
    const SearchResult t = required_tau_prime_for_ser(0.01, sys, 10.0);
    REQUIRE_FALSE(t.below_bracket);
    CHECK(ser_pipeline(sys, 10.0, t.value).ser == doctest::Approx(0.01).epsilon(0.01));
    const SearchResult a = required_alpha_for_ser(0.01, sys, 2.0);
    REQUIRE_FALSE(a.below_bracket);
    CHECK(ser_pipeline(sys, a.value, 2.0).ser == doctest::Approx(0.01).epsilon(0.01));
  }

  TEST_CASE("critical SNR is where the 1% target needs tau_prime = 2") {
    const double db = critical_snr_db(10.0, Resolution::finite(1));
    const double rho = std::pow(10.0, db / 10.0);
    CHECK(ser_pipeline({rho, Resolution::finite(1), std::nullopt}, 10.0, 2.0).ser ==
          doctest::Approx(0.01).epsilon(0.02));
    CHECK(critical_snr_db(40.0, Resolution::finite(1)) < db);
  }
}
