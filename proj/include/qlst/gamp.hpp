#pragma once

#include "qlst/quantizer.hpp"
#include "qlst/scalar_awgn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace qlst {

struct GampOptions {
  int max_iterations = 50;
  double damping = 0.7;          // weight of the new message
  double variance_floor = 1e-12;
  double tolerance = 1e-8;       // stop when mean |x_new - x_old|^2 falls below
};

/// Non-finite state reached during message passing.
class GampDiverged : public std::runtime_error {
 public:
  explicit GampDiverged(const std::string& what) : std::runtime_error(what) {}
};

/// Observations of y = f(scale * A * U + N), one column per independent
/// problem. For a finite-resolution quantizer the real and imaginary levels
/// (1-based) are given; for the linear receiver the raw complex outputs.
struct GampObservations {
  Eigen::MatrixXi re_levels;
  Eigen::MatrixXi im_levels;
  Eigen::MatrixXcd values;
};

struct GampProblem {
  const Eigen::MatrixXcd* matrix = nullptr;  // A, m x n
  double scale = 1.0;                        // multiplies A
  double entry_power = 1.0;                  // E|A_ij|^2 assumed by the variance updates
  QuantizerSpec quantizer = QuantizerSpec::linear();  // thresholds act on Re and Im separately
  double noise_var = 1.0;                    // complex noise variance before quantization
  ScalarPrior prior = ScalarPrior::gaussian();  // per entry of U, unit complex variance
};

struct GampResult {
  Eigen::MatrixXcd mean;       // n x L posterior means
  Eigen::MatrixXd variance;    // n x L posterior variances
  int iterations = 0;
  bool converged = false;
};

/// Sum-product GAMP with per-column scalar variances.
GampResult gamp_solve(const GampProblem& problem, const GampObservations& y, const GampOptions& options = {});

/// Mean and variance of a standard normal truncated to (a, b], a < b.
/// Evaluated on the tail side with Mills ratios so that far-tail intervals
/// keep relative accuracy.
void truncated_normal_moments(double a, double b, double& mean, double& variance);

/// Same moments for n intervals at once. Bounds must be finite; an infinite
/// bound should be replaced by one far enough out that the mass beyond it
/// is negligible (see finite_lower and finite_upper).
void truncated_normal_moments_batch(std::size_t n, const double* lo, const double* hi, double* mean,
                                    double* variance);

/// Clip (lo, hi] to at most 40 standard deviations beyond the other bound or
/// zero. Turns infinite bounds finite without a branch; the discarded mass is
/// below exp(-800) relative.
inline double finite_lower(double lo, double hi) { return std::max(lo, std::min(hi, 0.0) - 40.0); }
inline double finite_upper(double lo, double hi) { return std::min(hi, std::max(lo, 0.0) + 40.0); }

/// Posterior mean and variance of one real component x ~ prior (variance 1/2)
/// observed as r = x + N(0, noise_var).
void scalar_denoise(double r, double noise_var, const ScalarPrior& prior, double& mean, double& variance);

}  // namespace qlst
