#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qlst {

/// Converter resolution in bits. The infinite value denotes an ideal
/// (unquantized) converter.
class Resolution {
 public:
  static constexpr Resolution infinite() { return Resolution(kInfinite); }
  static Resolution finite(int bits);
  /// Accepts a positive integer or "inf".
  static Resolution parse(std::string_view text);

  constexpr bool is_infinite() const { return bits_ == kInfinite; }
  int bits() const;
  std::string to_string() const;

  friend constexpr bool operator==(Resolution, Resolution) = default;

 private:
  static constexpr int kInfinite = -1;
  constexpr explicit Resolution(int bits) : bits_(bits) {}
  int bits_;
};

/// Uniform mid-rise quantizer with thresholds r_k = (-2^{b-1} + k) * step,
/// k = 1 .. 2^b - 1, or the identity map when linear.
class QuantizerSpec {
 public:
  static QuantizerSpec linear();
  static QuantizerSpec uniform(int bits, double step);
  /// Step from calibrate_step(bits, rho); linear for the infinite resolution.
  static QuantizerSpec calibrated(Resolution resolution, double rho);

  bool is_linear() const { return bits_ == 0; }
  Resolution resolution() const;
  int bits() const;
  double step() const;
  int levels() const { return static_cast<int>(thresholds_.size()) + 1; }
  /// Interior thresholds r_1 .. r_{2^b - 1}.
  std::span<const double> thresholds() const { return thresholds_; }
  /// r_k for k in [0, 2^b], with r_0 = -inf and r_{2^b} = +inf.
  double threshold(int k) const;
  /// Same quantizer acting on inputs scaled by `factor` (step multiplied).
  QuantizerSpec scaled(double factor) const;

 private:
  QuantizerSpec() = default;
  int bits_ = 0;
  double step_ = 0.0;
  std::vector<double> thresholds_;
};

/// Step such that the extreme level is hit with probability 2^-b when the
/// input is N(0, (1 + rho) / 2). For bits == 1 returns 1.0 (threshold at
/// zero makes the step irrelevant). rho may be +inf only through
/// step_coefficient.
double calibrate_step(int bits, double rho);

/// calibrate_step(bits, rho) / sqrt(1 + rho); independent of rho.
double step_coefficient(int bits);

/// Index k in [1, 2^b] with w in (r_{k-1}, r_k].
int quantize_level(double w, const QuantizerSpec& spec);

/// Level index as a double for a finite quantizer, w itself when linear.
double quantize(double w, const QuantizerSpec& spec);

/// Psi_k(w, s) = Phi((sqrt2 r_k - w)/sqrt s) - Phi((sqrt2 r_{k-1} - w)/sqrt s).
double psi(int k, double w, double s, const QuantizerSpec& spec);

/// Kernel as printed: [exp(-(sqrt2 r_k - w)^2/2s) - exp(-(sqrt2 r_{k-1} - w)^2/2s)] / sqrt(2 pi s).
/// Equal to -d psi / dw.
double psi_prime(int k, double w, double s, const QuantizerSpec& spec);

/// All Psi_k and Psi'_k (printed sign) at once; both spans have 2^b entries.
/// One erfc per threshold, taken on the side of the tail it describes.
void level_kernels(double w, double s, const QuantizerSpec& spec, std::span<double> psi_out,
                   std::span<double> psi_prime_out);

}  // namespace qlst
