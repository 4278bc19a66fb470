#include "qlst/quadrature.hpp"

#include "qlst/special.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlst {

namespace {

struct LegendreRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

template <unsigned N>
LegendreRule expand_boost_rule() {
  const auto& a = boost::math::quadrature::gauss<double, N>::abscissa();
  const auto& wt = boost::math::quadrature::gauss<double, N>::weights();
  LegendreRule rule;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      rule.x.push_back(0.0);
      rule.w.push_back(wt[i]);
    } else {
      rule.x.push_back(a[i]);
      rule.w.push_back(wt[i]);
      rule.x.push_back(-a[i]);
      rule.w.push_back(wt[i]);
    }
  }
  return rule;
}

const LegendreRule& legendre_rule(int points) {
  static const LegendreRule r8 = expand_boost_rule<8>();
  static const LegendreRule r10 = expand_boost_rule<10>();
  static const LegendreRule r16 = expand_boost_rule<16>();
  static const LegendreRule r20 = expand_boost_rule<20>();
  switch (points) {
    case 8: return r8;
    case 10: return r10;
    case 16: return r16;
    case 20: return r20;
    default: throw std::invalid_argument("quadrature: points per segment must be 8, 10, 16 or 20");
  }
}

}  // namespace

GaussianRule GaussianRule::build(std::span<const Feature> features, const QuadratureOptions& options) {
  if (!(options.z_max > 0.0) || !(options.base_step > 0.0))
    throw std::invalid_argument("quadrature: z_max and base_step must be positive");
  const LegendreRule& leg = legendre_rule(options.points);
  const double lo = -options.z_max;
  const double hi = options.z_max;

  // Local segment length: base_step far from features, shrinking to half the
  // distance to the nearest feature center but never below that feature's width.
  std::vector<Feature> sharp;
  for (const Feature& f : features) {
    if (!std::isfinite(f.center) || !(f.width > 0.0) || f.width >= options.base_step) continue;
    if (f.center < lo - options.base_step || f.center > hi + options.base_step) continue;
    sharp.push_back(f);
  }
  std::sort(sharp.begin(), sharp.end(), [](const Feature& a, const Feature& b) { return a.center < b.center; });
  const auto local_step = [&](double z) {
    double h = options.base_step;
    if (sharp.empty()) return h;
    auto it = std::lower_bound(sharp.begin(), sharp.end(), z,
                               [](const Feature& f, double v) { return f.center < v; });
    const auto consider = [&](const Feature& f) { h = std::min(h, std::max(f.width, 0.5 * std::abs(z - f.center))); };
    if (it != sharp.end()) consider(*it);
    if (it != sharp.begin()) consider(*(it - 1));
    return h;
  };

  std::vector<double> breaks;
  if (sharp.empty()) {
    const int base_segments = static_cast<int>(std::ceil(2.0 * options.z_max / options.base_step));
    for (int i = 0; i <= base_segments; ++i) breaks.push_back(lo + (hi - lo) * i / base_segments);
  } else {
    double z = lo;
    breaks.push_back(z);
    while (z < hi) {
      z = std::min(hi, z + local_step(z));
      breaks.push_back(z);
    }
  }

  GaussianRule rule;
  rule.nodes_.reserve((breaks.size() - 1) * leg.x.size());
  rule.weights_.reserve(rule.nodes_.capacity());
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double mid = 0.5 * (breaks[s] + breaks[s + 1]);
    const double half = 0.5 * (breaks[s + 1] - breaks[s]);
    for (std::size_t i = 0; i < leg.x.size(); ++i) {
      const double z = mid + half * leg.x[i];
      rule.nodes_.push_back(z);
      rule.weights_.push_back(half * leg.w[i] * normal_pdf(z));
    }
  }
  return rule;
}

}  // namespace qlst
