#pragma once

#include "qlst/replica.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace qlst {

struct OptimizerOptions {
  int grid_points = 256;          // log-spaced coarse grid over [tau_min, 1]
  double tau_min = 1e-4;
  double tau_tolerance = 1e-6;    // golden-section stopping width
  double min_success_fraction = 0.9;
  int threads = 1;
};

struct TauSample {
  double tau;
  double value;
  bool ok;
};

struct TrainingOptimum {
  double tau_opt = 0.0;
  double value = 0.0;
  std::vector<TauSample> curve;  // the coarse grid, in grid order
  int failed_points = 0;
};

/// Maximizes objective(tau) over (0, 1]: coarse grid, then golden section
/// inside the bracket around the best grid point. The objective must be safe
/// to call concurrently when options.threads > 1.
TrainingOptimum maximize_over_tau(const std::function<double(double)>& objective, const OptimizerOptions& options = {});

/// (1 - tau) * alpha * I for the configuration with tau replaced. cfg.tau and
/// cfg.tau_prime are ignored.
double trained_rate(const SystemConfig& cfg, double tau, const NumericsOptions& numerics = {});

/// Optimal training fraction and rate per transmitter (bits/channel use/transmitter).
TrainingOptimum optimize_training(const SystemConfig& cfg, const NumericsOptions& numerics = {},
                                  const OptimizerOptions& options = {});

/// Rate per transmitter with the channel known at the receiver.
double rate_known(double rho, double sigma2, double alpha, Resolution adc, const ScalarPrior& input_prior,
                  const NumericsOptions& numerics = {}, std::optional<double> step = std::nullopt);

// ---------------------------------------------------------------------------
// Linearized (Bussgang) baseline

/// Gain factor of the linearized quantizer; defined for 1 and 2 bits only.
double bussgang_eta(int bits, double rho);
/// eta rho / ((1 - eta) rho + 1).
double bussgang_linear_snr(double eta, double rho);
/// load rho_l^2 / (1 + (1 + load) rho_l), load = tau beta.
double bussgang_effective_snr(double rho_l, double load);

struct BussgangRate {
  double eta = 0.0;
  double rho_l = 0.0;
  TrainingOptimum optimum;  // value = R_L
};

BussgangRate bussgang_rate(double rho, double alpha, double beta, int bits, const ScalarPrior& input_prior,
                           const NumericsOptions& numerics = {}, const OptimizerOptions& options = {});

// ---------------------------------------------------------------------------
// Asymptotic regimes

/// (1 - tau) [hbar(0, sigma2_bar + rho_bar) - hbar(rho_bar, sigma2_bar)], per receiver.
/// Depends on neither alpha nor the input distribution.
double small_alpha_rate(double tau, double rho, double sigma2, double beta, Resolution adc,
                        const NumericsOptions& numerics = {}, std::optional<double> step = std::nullopt);

TrainingOptimum small_alpha_tau_opt(double rho, double sigma2, double beta, Resolution adc,
                                    const NumericsOptions& numerics = {}, const OptimizerOptions& options = {},
                                    std::optional<double> step = std::nullopt);

/// Large-alpha training fraction for QPSK input; adc must be 1 bit or infinite.
double large_alpha_tau_opt(double rho, double beta, double alpha, Resolution adc);

// ---------------------------------------------------------------------------
// Inverse problems

struct AlphaSearchOptions {
  double alpha_min = 1e-3;
  double alpha_max = 1e4;
  double relative_tolerance = 1e-3;
};

struct AlphaSearchResult {
  double alpha = 0.0;
  /// The target is met already at alpha_min: the required ratio tends to zero.
  bool below_bracket = false;
  int evaluations = 0;
};

/// Bisection in log(alpha) for the smallest alpha whose monotone rate map
/// reaches `target`. Throws UnreachableTarget when rate(alpha_max) < target.
AlphaSearchResult solve_alpha_for(const std::function<double(double)>& rate_of_alpha, double target,
                                  const AlphaSearchOptions& options, const char* what);

/// Ratio alpha needed for R_opt (or R_known when `known`) to reach `target`.
/// cfg supplies rho, sigma2, beta, adc, dac and step; alpha and tau are ignored.
AlphaSearchResult required_alpha_for_rate(double target, const SystemConfig& cfg, bool known,
                                          const NumericsOptions& numerics = {}, const OptimizerOptions& options = {},
                                          const AlphaSearchOptions& search = {});

struct SaturationReport {
  std::vector<double> alphas;
  std::vector<double> scaled_info;  // alpha * I at each alpha
  double limit = 0.0;               // 2a, +inf for the Gaussian input
  bool monotone = true;             // nondecreasing up to 1e-10 relative
  double final_gap = 0.0;           // limit - last value
};

/// alpha * I at alpha in {1e2, 1e3, 1e4} for a fixed training fraction.
SaturationReport saturation_check(const SystemConfig& cfg, const NumericsOptions& numerics = {});

}  // namespace qlst
