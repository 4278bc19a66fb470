#include "qlst/gamp.hpp"

#include "qlst/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace qlst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Moments of a standard normal on (a, b] with 0 <= a < b (b may be +inf),
// written in terms of Mills ratios of the two bounds.
void upper_tail_moments(double a, double b, double& mean, double& second) {
  const double ma = mills_ratio(a);
  if (std::isinf(b)) {
    mean = 1.0 / ma;
    second = 1.0 + a / ma;
    return;
  }
  const double r = std::exp(0.5 * (a - b) * (a + b));  // phi(b) / phi(a)
  const double mb = mills_ratio(b);
  const double z = ma - r * mb;  // (Phi(b) - Phi(a)) / phi(a)
  mean = (1.0 - r) / z;
  second = 1.0 + (a - b * r) / z;
}

}  // namespace

void truncated_normal_moments(double a, double b, double& mean, double& variance) {
  double second;
  if (a >= 0.0) {
    upper_tail_moments(a, b, mean, second);
  } else if (b <= 0.0) {
    upper_tail_moments(-b, -a, mean, second);
    mean = -mean;
  } else {
    // One exp per finite bound: phi(x) and Q(|x|) share exp(-x^2/2).
    const double ea = std::isinf(a) ? 0.0 : std::exp(-0.5 * a * a);
    const double eb = std::isinf(b) ? 0.0 : std::exp(-0.5 * b * b);
    const double qa = std::isinf(a) ? 0.0 : 0.5 * ea * erfcx(-a / kSqrt2);
    const double qb = std::isinf(b) ? 0.0 : 0.5 * eb * erfcx(b / kSqrt2);
    const double z = 1.0 - qa - qb;
    const double pa = kInvSqrt2Pi * ea;
    const double pb = kInvSqrt2Pi * eb;
    const double apa = std::isinf(a) ? 0.0 : a * pa;
    const double bpb = std::isinf(b) ? 0.0 : b * pb;
    mean = (pa - pb) / z;
    second = 1.0 + (apa - bpb) / z;
  }
  variance = std::max(second - mean * mean, 0.0);
}

void scalar_denoise(double r, double noise_var, const ScalarPrior& prior, double& mean, double& variance) {
  if (prior.is_gaussian()) {
    // x ~ N(0, 1/2)
    mean = r * 0.5 / (0.5 + noise_var);
    variance = 0.5 * noise_var / (0.5 + noise_var);
    return;
  }
  const auto pts = prior.points();
  if (pts.size() == 2) {
    const double a = pts[1];
    mean = a * std::tanh(a * r / noise_var);
    variance = std::max(a * a - mean * mean, 0.0);
    return;
  }
  double top = -kInf;
  thread_local std::vector<double> expo;
  expo.resize(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double d = r - pts[j];
    expo[j] = -d * d / (2.0 * noise_var);
    top = std::max(top, expo[j]);
  }
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double w = std::exp(expo[j] - top);
    z += w;
    m1 += w * pts[j];
    m2 += w * pts[j] * pts[j];
  }
  mean = m1 / z;
  variance = std::max(m2 / z - mean * mean, 0.0);
}

GampResult gamp_solve(const GampProblem& problem, const GampObservations& y, const GampOptions& options) {
  if (!problem.matrix) throw std::invalid_argument("gamp: measurement matrix missing");
  const Eigen::MatrixXcd A = problem.matrix->operator*(problem.scale);
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  const bool linear = problem.quantizer.is_linear();
  const Eigen::Index cols = linear ? y.values.cols() : y.re_levels.cols();
  if (linear ? y.values.rows() != m : (y.re_levels.rows() != m || y.im_levels.rows() != m ||
                                       y.im_levels.cols() != cols))
    throw std::invalid_argument("gamp: observation dimensions do not match the matrix");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw std::invalid_argument("gamp: damping must lie in (0, 1]");
  if (!(problem.noise_var >= 0.0)) throw std::invalid_argument("gamp: noise variance must be nonnegative");

  const double a2 = problem.entry_power * problem.scale * problem.scale;
  const double floor = options.variance_floor;
  const double d = options.damping;

  // Interval bounds per level.
  std::vector<double> lower, upper;
  if (!linear) {
    const int levels = problem.quantizer.levels();
    lower.resize(levels + 1);
    upper.resize(levels + 1);
    for (int k = 1; k <= levels; ++k) {
      lower[k] = problem.quantizer.threshold(k - 1);
      upper[k] = problem.quantizer.threshold(k);
    }
    const auto check = [&](const Eigen::MatrixXi& lv) {
      if (lv.size() > 0 && (lv.minCoeff() < 1 || lv.maxCoeff() > levels))
        throw std::invalid_argument("gamp: observed level out of range");
    };
    check(y.re_levels);
    check(y.im_levels);
  }

  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, cols);
  Eigen::VectorXd tau_x = Eigen::VectorXd::Ones(cols);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(m, cols);
  Eigen::MatrixXcd p(m, cols), s_new(m, cols), r(n, cols), x_new(n, cols);
  Eigen::VectorXd tau_p(cols), tau_s(cols), tau_r(cols), tau_x_new(cols);
  Eigen::MatrixXd var_x(n, cols);
  std::vector<double> lo_buf(2 * m), hi_buf(2 * m), mean_buf(2 * m), var_buf(2 * m);

  GampResult out;
  for (int it = 1; it <= options.max_iterations; ++it) {
    out.iterations = it;
    for (Eigen::Index j = 0; j < cols; ++j) tau_p(j) = std::max(a2 * n * tau_x(j), floor);
    p.noalias() = A * x;
    for (Eigen::Index j = 0; j < cols; ++j) p.col(j) -= tau_p(j) * s.col(j);

    // Output step: posterior moments of z given y and z ~ CN(p, tau_p).
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double tp = tau_p(j);
      double acc = 0.0;
      if (linear) {
        const double g = 1.0 / (tp + problem.noise_var);
        s_new.col(j) = (y.values.col(j) - p.col(j)) * g;
        acc = m * g;  // (1 - tau_z / tau_p) / tau_p summed over rows
      } else {
        const double half = 0.5 * tp;
        const double sv = 0.5 * (tp + problem.noise_var);
        const double sd = std::sqrt(sv);
        const double inv_sd = 1.0 / sd;
        const double k = half / sv;
        // Real and imaginary parts interleaved, matching std::complex layout.
        const double* pj = reinterpret_cast<const double*>(p.data() + j * m);
        const int* lr = y.re_levels.data() + j * m;
        const int* li = y.im_levels.data() + j * m;
        for (Eigen::Index i = 0; i < m; ++i) {
          const double ar = (lower[lr[i]] - pj[2 * i]) * inv_sd, br = (upper[lr[i]] - pj[2 * i]) * inv_sd;
          const double ai = (lower[li[i]] - pj[2 * i + 1]) * inv_sd, bi = (upper[li[i]] - pj[2 * i + 1]) * inv_sd;
          lo_buf[2 * i] = finite_lower(ar, br);
          hi_buf[2 * i] = finite_upper(ar, br);
          lo_buf[2 * i + 1] = finite_lower(ai, bi);
          hi_buf[2 * i + 1] = finite_upper(ai, bi);
        }
        truncated_normal_moments_batch(2 * m, lo_buf.data(), hi_buf.data(), mean_buf.data(), var_buf.data());
        // E[z] - p = k sd * mean; var(z) = 2 (half - k half) + k^2 sv * (vr + vi).
        const double shift = k * sd / tp;
        double* sj = reinterpret_cast<double*>(s_new.data() + j * m);
        double var_sum = 0.0;
        for (Eigen::Index e = 0; e < 2 * m; ++e) {
          sj[e] = shift * mean_buf[e];
          var_sum += var_buf[e];
        }
        const double tz_sum = 2.0 * (half - k * half) * m + k * k * sv * var_sum;
        acc = (m - tz_sum / tp) / tp;
      }
      tau_s(j) = std::max(acc / m, floor);
    }
    if (it == 1) {
      s = s_new;
    } else {
      s = d * s_new + (1.0 - d) * s;
    }

    for (Eigen::Index j = 0; j < cols; ++j) tau_r(j) = 1.0 / (a2 * m * tau_s(j));
    r.noalias() = A.adjoint() * s;
    for (Eigen::Index j = 0; j < cols; ++j) r.col(j) = x.col(j) + tau_r(j) * r.col(j);

    // Input step.
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double half_noise = 0.5 * tau_r(j);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double mr, vr, mi, vi;
        scalar_denoise(r(i, j).real(), half_noise, problem.prior, mr, vr);
        scalar_denoise(r(i, j).imag(), half_noise, problem.prior, mi, vi);
        x_new(i, j) = {mr, mi};
        var_x(i, j) = std::max(vr + vi, floor);
        acc += var_x(i, j);
      }
      tau_x_new(j) = std::max(acc / n, floor);
    }
    const double change = (x_new - x).squaredNorm() / static_cast<double>(std::max<Eigen::Index>(n * cols, 1));
    if (it == 1) {
      x = x_new;
      tau_x = tau_x_new;
    } else {
      x = d * x_new + (1.0 - d) * x;
      tau_x = d * tau_x_new + (1.0 - d) * tau_x;
    }
    if (!std::isfinite(change) || !x.allFinite())
      throw GampDiverged("gamp: non-finite state at iteration " + std::to_string(it));
    if (change < options.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.mean = x;
  out.variance = var_x;
  return out;
}

}  // namespace qlst
