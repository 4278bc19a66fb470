#pragma once

#include "qlst/quadrature.hpp"
#include "qlst/quantizer.hpp"
#include "qlst/scalar_awgn.hpp"

#include <functional>
#include <optional>
#include <stdexcept>

namespace qlst {

struct SolverOptions {
  double damping = 0.5;        // Picard relaxation factor d in q <- (1-d) q + d F(q)
  double tolerance = 1e-10;    // on |F(q) - q|
  int max_iterations = 10000;
  double start_offset = 1e-6;  // runs start at 1 - offset and at offset
  double multistable_gap = 1e-6;
  bool accelerate = true;      // Aitken extrapolation of monotone Picard runs
};

struct NumericsOptions {
  QuadratureOptions quadrature{};
  SolverOptions solver{};
  AwgnOptions awgn{};
};

/// Fixed-point iteration that did not meet its tolerance.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double last_iterate, double residual, int iterations)
      : std::runtime_error(what), last_iterate_(last_iterate), residual_(residual), iterations_(iterations) {}
  double last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double last_iterate_;
  double residual_;
  int iterations_;
};

// ---------------------------------------------------------------------------
// Quantized-output functionals

/// Conditional output entropy in bits. For the linear quantizer this is the
/// differential entropy log2(pi e s).
double hbar(double gamma, double s, const QuantizerSpec& spec, const QuadratureOptions& options = {});

/// Fisher-information-like functional; 1/s for the linear quantizer.
double chi(double gamma, double s, const QuantizerSpec& spec, const QuadratureOptions& options = {});

struct OutputFunctionals {
  double hbar;
  double chi;
};

/// hbar and chi from one shared set of kernel evaluations.
OutputFunctionals output_functionals(double gamma, double s, const QuantizerSpec& spec,
                                     const QuadratureOptions& options = {});

// ---------------------------------------------------------------------------
// Scalar fixed points q = 1 - mmse(qtilde(q), prior)

struct OverlapSolution {
  double q = 0.0;
  double qtilde = 0.0;
  double mse = 1.0;
  int iterations = 0;
  double residual = 0.0;
  bool multistable = false;
  double low_branch_q = 0.0;  // limit of the run started near zero
};

/// Solves q = 1 - mmse(qtilde(q), prior) with runs from both ends of [0, 1].
/// Returns the high-q branch; `multistable` flags distinct limits.
OverlapSolution solve_overlap_map(const std::function<double(double)>& qtilde_of_q, const ScalarPrior& prior,
                                  const NumericsOptions& options = {});

/// Overlap fixed point in power-normalized units: signal power `power`,
/// noise 1 - power, `load` = training load (tau beta) or receiver ratio alpha,
/// quantizer thresholds already divided by sqrt(rho + sigma2).
OverlapSolution solve_overlap(double load, double power, const QuantizerSpec& normalized_quantizer,
                              const ScalarPrior& prior, const NumericsOptions& options = {});

// ---------------------------------------------------------------------------
// System description

struct SystemConfig {
  double rho = 10.0;     // pre-quantization SNR (linear), may be +inf
  double sigma2 = 1.0;   // noise variance
  double alpha = 1.0;    // receivers per transmitter K/M
  double beta = 40.0;    // blocklength per transmitter T/M
  std::optional<double> tau;        // training fraction of the block
  std::optional<double> tau_prime;  // training symbols per transmitter
  Resolution adc = Resolution::finite(1);
  std::optional<double> step;  // quantizer step; calibrated to rho when absent
  Resolution dac = Resolution::finite(1);
  ScalarPrior channel_prior = ScalarPrior::gaussian();

  /// tau * beta or tau_prime; exactly one of the two must be set.
  double training_load() const;
  ScalarPrior input_prior() const { return ScalarPrior::from_resolution(dac); }
  /// Quantizer in absolute units (finite rho only).
  QuantizerSpec quantizer() const;
  void validate() const;
};

/// Power-normalized view of (rho, sigma2, quantizer): everything divided by
/// rho + sigma2 so that rho = inf stays finite.
struct NormalizedSystem {
  double signal = 0.0;  // rho / (rho + sigma2)
  double noise = 1.0;   // sigma2 / (rho + sigma2)
  double scale = 1.0;   // rho + sigma2 (inf when rho is inf)
  QuantizerSpec quantizer = QuantizerSpec::linear();
};

NormalizedSystem normalize(double rho, double sigma2, Resolution adc, std::optional<double> step = std::nullopt);
NormalizedSystem normalize(const SystemConfig& cfg);

// ---------------------------------------------------------------------------
// Training and data fixed points

struct TrainingSolution {
  double q_g = 0.0;
  double qtilde_g = 0.0;
  double mse_g = 1.0;
  int iterations = 0;
  double residual = 0.0;
  bool multistable = false;
};

TrainingSolution solve_training_fixed_point(const SystemConfig& cfg, const NumericsOptions& options = {});

/// Training fixed point for an explicit load on a normalized system.
TrainingSolution solve_training_normalized(double load, const NormalizedSystem& sys, const ScalarPrior& channel_prior,
                                           const NumericsOptions& options = {});

struct EquivalentSystem {
  double rho_bar;
  double sigma2_bar;
};

/// rho_bar = rho (1 - mse_g), sigma2_bar = sigma2 + rho mse_g.
EquivalentSystem equivalent_system(double rho, double sigma2, double mse_g);

struct DataSolution {
  double q_x = 0.0;
  double qtilde_x = 0.0;
  double mse_x = 1.0;
  int iterations = 0;
  double residual = 0.0;
  bool multistable = false;
};

/// Data fixed point of the known-channel system (rho_bar, sigma2_bar).
/// `quantizer` is in absolute units.
DataSolution solve_data_fixed_point(double rho_bar, double sigma2_bar, double alpha, const QuantizerSpec& quantizer,
                                    const ScalarPrior& input_prior, const NumericsOptions& options = {});

struct FixedPointSolution {
  double q_g = 0.0;
  double qtilde_g = 0.0;
  double mse_g = 1.0;
  double rho_bar = 0.0;
  double sigma2_bar = 1.0;
  double q_x = 0.0;
  double qtilde_x = 0.0;
  double mse_x = 1.0;
  int iterations = 0;
  double residual = 0.0;
  bool multistable = false;
};

/// Per-receiver quantities of the known-channel system in normalized units:
/// signal `power`, noise 1 - power. Entropies of the linear receiver are
/// relative to the normalization (add log2(scale) for absolute values).
struct KnownChannelInfo {
  OverlapSolution data;
  double mutual_info = 0.0;  // bits per receiver
  double h_cond = 0.0;       // H(y | x, G) per receiver
  double h_uncond = 0.0;     // H(y | G) per receiver
};

KnownChannelInfo known_channel_info(double power, double alpha, const QuantizerSpec& normalized_quantizer,
                                    const ScalarPrior& input_prior, const NumericsOptions& options = {});

struct Analysis {
  FixedPointSolution fixed_point;
  double mutual_info = 0.0;  // bits per receiver, per channel use after training
  double h_cond = 0.0;
  double h_uncond = 0.0;
};

/// Training fixed point, equivalence transform, known-channel evaluation.
/// `mse_g_override` skips the training solve.
Analysis analyze(const SystemConfig& cfg, const NumericsOptions& options = {},
                 std::optional<double> mse_g_override = std::nullopt);

/// Direct evaluation with the unknown-channel parameters (rho, sigma2, q_g)
/// in absolute units, without the equivalence transform. Finite rho only.
double mutual_info_unknown_channel(const SystemConfig& cfg, const NumericsOptions& options = {});

}  // namespace qlst
