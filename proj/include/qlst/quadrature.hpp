#pragma once

#include <span>
#include <vector>

namespace qlst {

/// Layout of the composite Gauss-Legendre rule used for every expectation
/// over a standard normal variable.
struct QuadratureOptions {
  double z_max = 9.0;      // integration range [-z_max, z_max] in standard deviations
  double base_step = 0.9;  // segment length away from sharp features (200 nodes when none)
  int points = 10;         // Gauss-Legendre points per segment: 8, 10, 16 or 20
};

/// A location where the integrand changes on a scale much shorter than one
/// standard deviation (a quantizer threshold seen through a narrow kernel).
struct Feature {
  double center;
  double width;
};

/// Nodes and weights approximating E[f(z)], z ~ N(0,1). Segments are graded
/// geometrically around each feature so that kernels of width down to ~1e-8
/// are resolved.
class GaussianRule {
 public:
  static GaussianRule build(std::span<const Feature> features, const QuadratureOptions& options = {});

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }

  template <class F>
  double expect(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(nodes_[i]);
    return acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace qlst
