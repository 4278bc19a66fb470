#include "qlst/replica.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace qlst;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

SystemConfig config(double rho, double alpha, Resolution adc, double tau) {
  SystemConfig c;
  c.rho = rho;
  c.alpha = alpha;
  c.adc = adc;
  c.tau = tau;
  return c;
}

// Root of q = qt/(1+qt), qt = L rho / (sigma2 + rho - rho q): linear receiver,
// Gaussian channel entries. Plain bisection.
double linear_training_q(double load, double rho, double sigma2) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double q = 0.5 * (lo + hi);
    const double qt = load * rho / (sigma2 + rho - rho * q);
    (qt / (1.0 + qt) > q ? lo : hi) = q;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_SUITE("replica") {
  TEST_CASE("linear receiver functionals are exact") {
    for (double s : {0.1, 1.0, 7.0}) {
      CHECK(hbar(3.0, s, QuantizerSpec::linear()) == std::log2(std::numbers::pi * std::numbers::e * s));
      CHECK(chi(3.0, s, QuantizerSpec::linear()) == 1.0 / s);
    }
  }

  TEST_CASE("one-bit functionals at gamma = 0") {
    const QuantizerSpec q = QuantizerSpec::uniform(1, 1.0);
    CHECK(hbar(0.0, 1.0, q) == doctest::Approx(2.0).epsilon(1e-14));
    for (double s : {0.5, 2.0}) CHECK(chi(0.0, s, q) == doctest::Approx(2.0 / (std::numbers::pi * s)).epsilon(1e-14));
  }

  TEST_CASE("quantized functionals against high-precision integrals") {
    // mpmath quad of -2 sum Psi log2 Psi and sum Psi'^2 / Psi against phi(z).
    struct Ref {
      int bits;
      double step, gamma, s, hbar, chi;
    };
    const Ref refs[] = {
        {1, 1.0, 1.0, 1.0, 1.4426950408889634074, 0.48053795807491033215},
        {1, 1.0, 2.0, 0.5, 0.92299316603007768129, 0.63011304653494936696},
        {2, 0.5, 1.0, 0.3, 2.3951446230998022212, 2.1696060652669379013},
    };
    for (const Ref& r : refs) {
      const QuantizerSpec q = QuantizerSpec::uniform(r.bits, r.step);
      CHECK(std::abs(hbar(r.gamma, r.s, q) - r.hbar) < 1e-8);
      CHECK(std::abs(chi(r.gamma, r.s, q) - r.chi) < 1e-8);
      const OutputFunctionals both = output_functionals(r.gamma, r.s, q);
      CHECK(both.hbar == doctest::Approx(hbar(r.gamma, r.s, q)).epsilon(1e-15));
      CHECK(both.chi == doctest::Approx(chi(r.gamma, r.s, q)).epsilon(1e-15));
    }
  }

  TEST_CASE("fine quantizer approaches the linear branch") {
    // gamma + s = 3 = 1 + rho for the calibration.
    const QuantizerSpec q = QuantizerSpec::calibrated(Resolution::finite(12), 2.0);
    CHECK(chi(2.0, 1.0, q) == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(hbar(1.0, 0.0, QuantizerSpec::linear()), std::invalid_argument);
    CHECK_THROWS_AS(chi(-1.0, 1.0, QuantizerSpec::uniform(1, 1.0)), std::invalid_argument);
  }

  TEST_CASE("training fixed point of the linear receiver") {
    for (double rho : {0.5, 10.0, 300.0})
      for (double load : {0.5, 2.8, 40.0}) {
        SystemConfig c = config(rho, 1.0, Resolution::infinite(), load / 40.0);
        const TrainingSolution t = solve_training_fixed_point(c);
        CHECK(t.q_g == doctest::Approx(linear_training_q(load, rho, 1.0)).epsilon(1e-10));
        CHECK(t.mse_g == doctest::Approx(1.0 - t.q_g).epsilon(1e-14));
      }
  }

  TEST_CASE("fixed points: residuals, ranges and power conservation") {
    for (Resolution b : {Resolution::finite(1), Resolution::finite(3), Resolution::infinite()})
      for (double rho : {1.0, 10.0, 100.0}) {
        const SystemConfig c = config(rho, 2.0, b, 0.05);
        const Analysis a = analyze(c);
        const FixedPointSolution& f = a.fixed_point;
        CHECK(f.residual <= 1e-10);
        CHECK(f.q_g >= 0.0);
        CHECK(f.q_g <= 1.0);
        CHECK(f.q_x >= 0.0);
        CHECK(f.q_x <= 1.0);
        CHECK(f.qtilde_x >= 0.0);
        CHECK(f.rho_bar + f.sigma2_bar == doctest::Approx(rho + 1.0).epsilon(1e-14));
        CHECK(a.mutual_info >= 0.0);
        if (!b.is_infinite()) CHECK(a.mutual_info <= std::min(2.0 * b.bits(), 2.0 / c.alpha) + 1e-12);
        CHECK(a.h_uncond >= a.h_cond - 1e-12);
      }
  }

  TEST_CASE("equivalence identity: unknown-channel route equals known-channel route") {
    for (Resolution b : {Resolution::finite(1), Resolution::infinite()})
      for (double rho : {1.0, 10.0})
        for (double alpha : {0.5, 4.0}) {
          const SystemConfig c = config(rho, alpha, b, 0.1);
          CHECK(std::abs(mutual_info_unknown_channel(c) - analyze(c).mutual_info) < 1e-8);
        }
  }

  TEST_CASE("useless channel estimate gives zero information") {
    const SystemConfig c = config(10.0, 2.0, Resolution::finite(1), 0.1);
    CHECK(analyze(c, {}, 1.0).mutual_info == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    const Analysis perfect = analyze(c, {}, 0.0);
    CHECK(perfect.fixed_point.rho_bar == 10.0);
    CHECK(perfect.fixed_point.sigma2_bar == 1.0);
  }

  TEST_CASE("noiseless system stays finite after normalization") {
    const SystemConfig c = config(kInf, 2.0, Resolution::finite(2), 0.1);
    const Analysis a = analyze(c);
    CHECK(std::isfinite(a.mutual_info));
    CHECK(a.mutual_info > 0.0);
  }

  TEST_CASE("equivalent system") {
    const EquivalentSystem e = equivalent_system(10.0, 1.0, 0.2);
    CHECK(e.rho_bar == doctest::Approx(8.0));
    CHECK(e.sigma2_bar == doctest::Approx(3.0));
  }
}
