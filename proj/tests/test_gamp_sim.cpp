#include "qlst/gamp_sim.hpp"

#include "doctest.h"

#include <set>

using namespace qlst;

TEST_SUITE("gamp_sim") {
  TEST_CASE("trial seeds are deterministic and distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 5000; ++i) seen.insert(trial_seed(1, i));
    for (std::uint64_t i = 0; i < 5000; ++i) seen.insert(trial_seed(2, i));
    CHECK(seen.size() == 10000);
    CHECK(trial_seed(7, 3) == trial_seed(7, 3));
  }

  TEST_CASE("dimensions round alpha M and tau_prime M") {
    TrialConfig c;
    c.transmitters = 30;
    c.alpha = 2.5;
    c.tau_prime = 1.5;
    CHECK(c.receivers() == 75);
    CHECK(c.training_length() == 45);
    c.transmitters = 0;
    CHECK_THROWS(c.validate());
  }

  TEST_CASE("Monte Carlo result does not depend on the thread count") {
    TrialConfig c;
    c.transmitters = 16;
    c.alpha = 4.0;
    c.tau_prime = 2.0;
    c.rho = 10.0;
    const McResult one = monte_carlo_ser(c, 9, 42, 1);
    const McResult three = monte_carlo_ser(c, 9, 42, 3);
    CHECK(one.symbol_errors == three.symbol_errors);
    CHECK(one.mean_channel_mse == three.mean_channel_mse);
    CHECK(one.n_symbol_decisions == three.n_symbol_decisions);
    const McResult other = monte_carlo_ser(c, 9, 43, 1);
    CHECK(other.mean_channel_mse != one.mean_channel_mse);
  }

  TEST_CASE("one trial: decision count and reproducibility") {
    TrialConfig c;
    c.transmitters = 20;
    c.alpha = 5.0;
    c.tau_prime = 2.0;
    const double mse = theory_channel_mse(c);
    const TrialResult a = gamp2_trial(c, mse, 99), b = gamp2_trial(c, mse, 99);
    CHECK(a.symbol_errors == b.symbol_errors);
    CHECK(a.channel_mse == b.channel_mse);
    CHECK(a.symbols > 0);
    CHECK(a.symbol_errors <= a.symbols);
  }

  TEST_CASE("empirical channel error is close to the fixed-point prediction") {
    TrialConfig c;
    c.transmitters = 50;
    c.alpha = 5.0;
    c.tau_prime = 2.0;
    c.rho = 10.0;
    const McResult r = monte_carlo_ser(c, 12, 3, 2);
    CHECK(r.diverged_trials == 0);
    CHECK(r.mean_channel_mse == doctest::Approx(theory_channel_mse(c)).epsilon(0.1));
  }
}
