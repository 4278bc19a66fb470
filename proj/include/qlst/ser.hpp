#pragma once

#include "qlst/rate_optimizer.hpp"
#include "qlst/replica.hpp"

#include <optional>

namespace qlst {

/// 2 Q(sqrt(qtilde)) - Q(sqrt(qtilde))^2: QPSK symbol error rate of the
/// decoupled channel with SNR qtilde.
double ser_qpsk_theory(double qtilde);

enum class SerRegime { Exact, LargeAlpha };

struct SerReport {
  double ser = 0.75;
  double qtilde_x = 0.0;
  FixedPointSolution fixed_point;
  SerRegime regime = SerRegime::Exact;
};

/// Receiver description shared by the SER routines: noise variance is 1 and
/// the input is QPSK throughout.
struct SerSystem {
  double rho = 10.0;  // may be +inf
  Resolution adc = Resolution::finite(1);
  std::optional<double> step;  // calibrated when absent
};

/// Training fixed point at load tau_prime, equivalence transform, data fixed
/// point, then the QPSK error formula.
SerReport ser_pipeline(const SerSystem& sys, double alpha, double tau_prime, const NumericsOptions& numerics = {});

/// 2 Q(sqrt(alpha rho_bar chi(rho_bar, sigma2_bar))), valid for large alpha.
SerReport ser_large_alpha(const SerSystem& sys, double alpha, double tau_prime, const NumericsOptions& numerics = {});

struct SearchResult {
  double value = 0.0;
  /// The target is met at the lower end of the bracket.
  bool below_bracket = false;
  int evaluations = 0;
};

struct SerSearchOptions {
  double lower = 1e-3;
  double upper = 1e3;
  double relative_tolerance = 1e-3;
};

/// Training load tau_prime at which the SER equals `target_ser`.
SearchResult required_tau_prime_for_ser(double target_ser, const SerSystem& sys, double alpha,
                                        const NumericsOptions& numerics = {}, const SerSearchOptions& search = {});

/// Ratio alpha at which the SER equals `target_ser`.
SearchResult required_alpha_for_ser(double target_ser, const SerSystem& sys, double tau_prime,
                                    const NumericsOptions& numerics = {},
                                    const SerSearchOptions& search = {1e-3, 1e4, 1e-3});

/// SNR in dB where `target_ser` is reached with training load tau_prime
/// (the knee of the required-training curve; defaults: 1% at tau_prime = 2).
double critical_snr_db(double alpha, Resolution adc, const NumericsOptions& numerics = {}, double target_ser = 0.01,
                       double tau_prime = 2.0);

}  // namespace qlst
