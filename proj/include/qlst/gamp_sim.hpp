#pragma once

#include "qlst/gamp.hpp"
#include "qlst/replica.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qlst {

struct TrialConfig {
  int transmitters = 50;          // M
  double alpha = 5.0;             // K = round(alpha M)
  double tau_prime = 2.0;         // training length round(tau_prime M)
  double rho = 10.0;              // may be +inf (noiseless)
  Resolution adc = Resolution::finite(1);
  std::optional<double> step;     // calibrated when absent
  Resolution dac = Resolution::finite(1);
  GampOptions gamp{};
  /// Use the empirical channel-estimation error instead of the fixed-point
  /// value when setting the detection variances.
  bool empirical_mse = false;

  int receivers() const;
  int training_length() const;
  void validate() const;
};

struct TrialResult {
  int symbol_errors = 0;
  int symbols = 0;
  double channel_mse = 0.0;  // empirical per-entry error of the channel estimate
  int training_iterations = 0;
  int detection_iterations = 0;
};

/// Per-trial seed from (base_seed, trial_index) through SplitMix64 mixing.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index);

/// Channel-estimation error predicted by the training fixed point at load tau_prime.
double theory_channel_mse(const TrialConfig& cfg, const NumericsOptions& numerics = {});

/// One draw of channel, training block, and data vector followed by GAMP
/// channel estimation, equivalence-informed GAMP detection, and hard decisions.
TrialResult gamp2_trial(const TrialConfig& cfg, double mse_g, std::uint64_t seed);

struct McResult {
  double mean_ser = 0.0;
  double std_error = 0.0;  // sqrt(p (1 - p) / decisions)
  int n_trials = 0;
  long long n_symbol_decisions = 0;
  long long symbol_errors = 0;
  int diverged_trials = 0;
  double mean_channel_mse = 0.0;
  double mse_g = 0.0;  // value used by the detector (theory unless empirical)
};

/// Aggregate over n_trials independent trials. Results depend only on
/// (cfg, n_trials, base_seed), not on the number of threads.
McResult monte_carlo_ser(const TrialConfig& cfg, int n_trials, std::uint64_t base_seed, int threads = 1,
                         const NumericsOptions& numerics = {});

}  // namespace qlst
