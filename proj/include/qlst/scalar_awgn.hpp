#pragma once

#include "qlst/quadrature.hpp"
#include "qlst/quantizer.hpp"

#include <span>
#include <vector>

namespace qlst {

/// Per-real-component distribution of a complex input (or channel entry)
/// with iid real and imaginary parts of variance 1/2.
class ScalarPrior {
 public:
  enum class Kind { Discrete, Gaussian };

  static ScalarPrior gaussian();
  /// 2^bits equiprobable, equally spaced, symmetric points (2^{2a}-QAM componentwise).
  static ScalarPrior discrete(int bits);
  /// Discrete for finite resolution, Gaussian for infinite.
  static ScalarPrior from_resolution(Resolution dac);

  Kind kind() const { return kind_; }
  bool is_gaussian() const { return kind_ == Kind::Gaussian; }
  int bits() const;
  std::span<const double> points() const { return points_; }
  /// Entropy of the complex symbol in bits (2a); +inf for the Gaussian prior.
  double complex_entropy_bits() const;
  Resolution resolution() const;

 private:
  Kind kind_ = Kind::Gaussian;
  int bits_ = 0;
  std::vector<double> points_;
};

inline constexpr int kMaxDiscreteBits = 6;

struct AwgnOptions {
  QuadratureOptions quadrature{};
  bool force_quadrature = false;  // evaluate the Gaussian prior numerically too (self-test)
};

/// Real-component mutual information (nats) of y = sqrt(lambda) x + n,
/// x ~ prior, n ~ N(0, 1/2).
double real_mutual_info_nats(double lambda, const ScalarPrior& prior, const AwgnOptions& options = {});

/// Real-component MMSE E(x - E[x|y])^2 of the same channel, in [0, 1/2].
double real_mmse(double lambda, const ScalarPrior& prior, const AwgnOptions& options = {});

/// I(x; y) in bits for y = sqrt(lambda) x + n, n ~ CN(0, 1); lambda may be +inf.
double mutual_info_awgn(double lambda, const ScalarPrior& prior, const AwgnOptions& options = {});

/// E|x - E[x|y]|^2 for the same channel, in [0, 1]; lambda may be +inf.
double mmse_awgn(double lambda, const ScalarPrior& prior, const AwgnOptions& options = {});

}  // namespace qlst
