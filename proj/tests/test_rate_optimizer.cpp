#include "qlst/errors.hpp"
#include "qlst/rate_optimizer.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace qlst;

namespace {
SystemConfig config(double rho, double alpha, Resolution adc, Resolution dac = Resolution::finite(1)) {
  SystemConfig c;
  c.rho = rho;
  c.alpha = alpha;
  c.adc = adc;
  c.dac = dac;
  return c;
}
}  // namespace

TEST_SUITE("rate_optimizer") {
  TEST_CASE("maximize_over_tau finds a log-parabola peak") {
    for (double peak : {0.5, 0.03, 2e-4}) {
      const TrainingOptimum o =
          maximize_over_tau([&](double t) { return -std::pow(std::log(t / peak), 2.0); });
      CHECK(o.tau_opt == doctest::Approx(peak).epsilon(1e-4));
      CHECK(o.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
      CHECK(o.curve.size() == 256);
    }
  }

  TEST_CASE("maximize_over_tau steps below the grid when the peak is there") {
    const TrainingOptimum o = maximize_over_tau([](double t) { return -std::pow(std::log(t / 3e-6), 2.0); });
    CHECK(o.tau_opt == doctest::Approx(3e-6).epsilon(1e-3));
  }

  TEST_CASE("maximize_over_tau threads do not change the answer") {
    const auto f = [](double t) { return std::sin(3.0 * t) * (1.0 - t); };
    OptimizerOptions one, four;
    four.threads = 4;
    const TrainingOptimum a = maximize_over_tau(f, one), b = maximize_over_tau(f, four);
    CHECK(a.tau_opt == b.tau_opt);
    CHECK(a.value == b.value);
  }

  TEST_CASE("trained rate is (1 - tau) alpha I") {
    SystemConfig c = config(10.0, 3.0, Resolution::finite(2));
    c.tau = 0.08;
    const double i = analyze(c).mutual_info;
    CHECK(trained_rate(c, 0.08) == doctest::Approx(0.92 * 3.0 * i).epsilon(1e-14));
  }

  TEST_CASE("known channel bounds the trained optimum; both below 2a") {
    for (Resolution b : {Resolution::finite(1), Resolution::infinite()})
      for (double alpha : {0.3, 5.0}) {
        const SystemConfig c = config(10.0, alpha, b);
        const TrainingOptimum o = optimize_training(c);
        const double known = rate_known(10.0, 1.0, alpha, b, c.input_prior());
        CHECK(o.value <= known + 1e-12);
        CHECK(known <= 2.0 + 1e-12);
        CHECK(o.tau_opt > 0.0);
        CHECK(o.tau_opt < 1.0);
      }
  }

  TEST_CASE("Gaussian input, linear receiver, known channel: alpha log2(1 + rho) at small alpha") {
    // One receiver per many transmitters sees the sum power: I -> log2(1 + rho) per receiver.
    const double r = rate_known(10.0, 1.0, 1e-4, Resolution::infinite(), ScalarPrior::gaussian());
    CHECK(r / 1e-4 == doctest::Approx(std::log2(11.0)).epsilon(1e-3));
  }

  TEST_CASE("Bussgang pieces") {
    CHECK(bussgang_eta(1, 10.0) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-15));
    const double eta2 = bussgang_eta(2, 10.0);
    CHECK(eta2 > 2.0 / std::numbers::pi);
    CHECK(eta2 < 1.0);
    CHECK(bussgang_linear_snr(0.5, 4.0) == doctest::Approx(2.0 / 3.0));
    CHECK(bussgang_effective_snr(2.0, 1.5) == doctest::Approx(1.5 * 4.0 / (1.0 + 2.5 * 2.0)));
    CHECK_THROWS_AS(bussgang_eta(3, 1.0), std::invalid_argument);
  }

  TEST_CASE("small-alpha rate matches the exact rate per receiver") {
    for (Resolution b : {Resolution::finite(1), Resolution::finite(3), Resolution::infinite()}) {
      SystemConfig c = config(10.0, 0.01, b);
      for (double tau : {0.02, 0.1, 0.4}) {
        const double exact = trained_rate(c, tau) / c.alpha;
        CHECK(small_alpha_rate(tau, 10.0, 1.0, 40.0, b) == doctest::Approx(exact).epsilon(0.01));
      }
    }
  }

  TEST_CASE("large-alpha training fraction shrinks with alpha") {
    for (Resolution b : {Resolution::finite(1), Resolution::infinite()}) {
      const double t3 = large_alpha_tau_opt(10.0, 40.0, 1e3, b), t4 = large_alpha_tau_opt(10.0, 40.0, 1e4, b);
      CHECK(t3 > t4);
      CHECK(t4 > 0.0);
    }
    CHECK_THROWS(large_alpha_tau_opt(10.0, 40.0, 1e3, Resolution::finite(2)));
  }

  TEST_CASE("alpha search: root, floor and unreachable targets") {
    const auto rate = [](double a) { return std::log1p(a); };
    const AlphaSearchResult r = solve_alpha_for(rate, 2.0, {}, "test");
    CHECK(r.alpha == doctest::Approx(std::exp(2.0) - 1.0).epsilon(2e-3));
    CHECK_FALSE(r.below_bracket);
    CHECK(solve_alpha_for(rate, 1e-6, {}, "test").below_bracket);
    CHECK_THROWS_AS(solve_alpha_for(rate, 20.0, {}, "test"), UnreachableTarget);
    CHECK_THROWS_AS(required_alpha_for_rate(2.0, config(10.0, 1.0, Resolution::finite(1)), false), UnreachableTarget);
  }

  TEST_CASE("saturation of alpha I at 2a") {
    SystemConfig c = config(10.0, 1.0, Resolution::finite(1), Resolution::finite(2));
    c.tau = 0.07;
    const SaturationReport s = saturation_check(c);
    CHECK(s.limit == 4.0);
    CHECK(s.monotone);
    CHECK(std::abs(s.final_gap) < 0.05);
  }
}
