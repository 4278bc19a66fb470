#include "qlst/presets.hpp"

#include "qlst/errors.hpp"
#include "qlst/gamp_sim.hpp"
#include "qlst/parallel.hpp"
#include "qlst/rate_optimizer.hpp"
#include "qlst/ser.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qlst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBeta = 40.0;

double db_to_rho(double db) {
  if (std::isinf(db)) return db > 0.0 ? kInf : 0.0;
  return std::pow(10.0, db / 10.0);
}

double bits_value(Resolution r) { return r.is_infinite() ? kInf : r.bits(); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return g;
}

std::vector<double> step_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
  return g;
}

std::string fmt(double v) { return format_double(v); }

std::string label(std::initializer_list<std::pair<const char*, double>> parts, const char* tail = nullptr) {
  std::string s;
  for (const auto& [k, v] : parts) {
    if (!s.empty()) s += ' ';
    s += k;
    s += '=';
    s += fmt(v);
  }
  if (tail) {
    s += ' ';
    s += tail;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Sweep plumbing

struct Task {
  std::string series;
  std::vector<Cell> keys;
  std::function<std::vector<double>()> compute;
};

struct Point {
  std::vector<Cell> keys;
  std::vector<double> v;
  bool ok = false;
  bool unreachable = false;
};

class Table {
 public:
  Table(std::vector<std::string> keys, std::vector<std::string> values)
      : key_columns_(std::move(keys)), value_columns_(std::move(values)) {}

  void add(std::string series, std::vector<Cell> keys, std::function<std::vector<double>()> compute) {
    tasks_.push_back({std::move(series), std::move(keys), std::move(compute)});
  }

  /// Evaluates the pending tasks and appends their rows to the report.
  void run(int threads, PresetReport& report) {
    const std::size_t first = points_.size();
    const std::size_t n = tasks_.size() - first;
    points_.resize(tasks_.size());
    std::vector<std::string> status(n);
    parallel_for(n, threads, [&](std::size_t i) {
      Point& p = points_[first + i];
      p.keys = tasks_[first + i].keys;
      p.v.assign(value_columns_.size(), kNaN);
      try {
        std::vector<double> v = tasks_[first + i].compute();
        std::copy_n(v.begin(), std::min(v.size(), p.v.size()), p.v.begin());
        p.ok = true;
        status[i] = "ok";
      } catch (const UnreachableTarget& e) {
        // Not a solver failure: the requirement is infinite at this point.
        p.unreachable = true;
        p.v[0] = kInf;
        status[i] = std::string("unreachable: ") + e.what();
      } catch (const std::exception& e) {
        status[i] = e.what();
      }
    });
    if (report.data.columns.empty()) {
      report.data.columns = key_columns_;
      report.data.columns.insert(report.data.columns.end(), value_columns_.begin(), value_columns_.end());
      report.data.columns.push_back("status");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Point& p = points_[first + i];
      std::vector<Cell> row = p.keys;
      for (double v : p.v) row.emplace_back(v);
      row.emplace_back(status[i]);
      report.data.rows.push_back(std::move(row));
      ++report.points;
      if (!p.ok && !p.unreachable) ++report.failed_points;
    }
  }

  /// Points of one series in insertion order.
  std::vector<Point> series(const std::string& name) const {
    std::vector<Point> out;
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (tasks_[i].series == name) out.push_back(points_[i]);
    return out;
  }

  std::size_t column(const std::string& name) const {
    const auto it = std::find(value_columns_.begin(), value_columns_.end(), name);
    if (it == value_columns_.end()) throw std::logic_error("preset: no value column " + name);
    return static_cast<std::size_t>(it - value_columns_.begin());
  }

 private:
  std::vector<std::string> key_columns_;
  std::vector<std::string> value_columns_;
  std::vector<Task> tasks_;
  std::vector<Point> points_;
};

void expect(PresetReport& r, std::string name, bool passed, std::string detail, bool caption = false) {
  r.assertions.push_back({std::move(name), passed, std::move(detail), caption});
}

double key_number(const Point& p, std::size_t i) {
  if (const double* d = std::get_if<double>(&p.keys.at(i))) return *d;
  return kNaN;
}

/// Checks that column `col` moves in `direction` (+1 up, -1 down) along the
/// series, allowing a relative slack for solver tolerances. Failed points are
/// skipped. Returns an empty string or a description of the first violation.
std::string monotone_violation(const std::vector<Point>& pts, std::size_t x_key, std::size_t col, int direction,
                               double rel_slack) {
  const Point* prev = nullptr;
  std::size_t index = 0;
  for (const Point& p : pts) {
    ++index;
    if (!p.ok || std::isnan(p.v[col])) continue;
    if (prev) {
      const double a = prev->v[col], b = p.v[col];
      const double slack = rel_slack * std::max(std::abs(a), std::abs(b));
      if (direction * (b - a) < -slack) {
        std::ostringstream s;
        s << "point " << index << " (x=" << fmt(key_number(p, x_key)) << "): " << fmt(a) << " -> " << fmt(b);
        return s.str();
      }
    }
    prev = &p;
  }
  return {};
}

std::optional<Point> find_point(const std::vector<Point>& pts, std::size_t key, double x) {
  for (const Point& p : pts)
    if (key_number(p, key) == x) return p;
  return std::nullopt;
}

SystemConfig base_config(double rho, double alpha, Resolution adc, Resolution dac) {
  SystemConfig c;
  c.rho = rho;
  c.sigma2 = 1.0;
  c.alpha = alpha;
  c.beta = kBeta;
  c.adc = adc;
  c.dac = dac;
  return c;
}

const std::vector<Resolution> kB1Inf{Resolution::finite(1), Resolution::infinite()};
const std::vector<Resolution> kB123Inf{Resolution::finite(1), Resolution::finite(2), Resolution::finite(3),
                                       Resolution::infinite()};
const std::vector<Resolution> kB12Inf{Resolution::finite(1), Resolution::finite(2), Resolution::infinite()};
const std::vector<Resolution> kA12Inf{Resolution::finite(1), Resolution::finite(2), Resolution::infinite()};

std::vector<double> snr_axis(const PresetOptions& o, double lo, double hi, bool with_infinity) {
  if (!o.snr_db.empty()) return o.snr_db;
  std::vector<double> g = step_grid(lo, hi, 1.0);
  if (with_infinity) g.push_back(kInf);
  return g;
}

// ---------------------------------------------------------------------------
// fig1: R_opt and R_known vs alpha

void fig1(const PresetOptions& o, PresetReport& r) {
  const auto alphas = o.alpha.empty() ? log_grid(0.1, 1000.0, 33) : o.alpha;
  const auto& num = o.numerics;
  Table t({"kind", "snr_db", "a", "b", "channel"}, {"alpha", "rate", "tau_opt"});
  for (double snr : {0.0, 10.0})
    for (Resolution a : kA12Inf)
      for (Resolution b : kB1Inf)
        for (bool known : {false, true}) {
          const std::string s = label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}},
                                      known ? "known" : "trained");
          for (double alpha : alphas)
            t.add(s, {std::string("curve"), snr, bits_value(a), bits_value(b), std::string(known ? "known" : "trained")},
                  [=, &num]() -> std::vector<double> {
                    const SystemConfig c = base_config(db_to_rho(snr), alpha, b, a);
                    if (known) return {alpha, rate_known(c.rho, 1.0, alpha, b, c.input_prior(), num), kNaN};
                    const TrainingOptimum opt = optimize_training(c, num);
                    return {alpha, opt.value, opt.tau_opt};
                  });
        }
  // 90%-of-saturation markers for a = 2 at 10 dB.
  struct Marker {
    Resolution b;
    bool known;
    double expected;
  };
  const std::vector<Marker> markers{{Resolution::infinite(), true, 2.0},
                                    {Resolution::infinite(), false, 4.0},
                                    {Resolution::finite(1), true, 8.0},
                                    {Resolution::finite(1), false, 28.0}};
  for (const Marker& m : markers)
    t.add(label({{"b", bits_value(m.b)}}, m.known ? "marker known" : "marker trained"),
          {std::string("marker90"), 10.0, 2.0, bits_value(m.b), std::string(m.known ? "known" : "trained")},
          [m, &num]() -> std::vector<double> {
            const SystemConfig c = base_config(10.0, 1.0, m.b, Resolution::finite(2));
            const double alpha = required_alpha_for_rate(0.9 * 4.0, c, m.known, num).alpha;
            SystemConfig at = c;
            at.alpha = alpha;
            if (m.known) return {alpha, rate_known(c.rho, 1.0, alpha, m.b, c.input_prior(), num), kNaN};
            const TrainingOptimum opt = optimize_training(at, num);
            return {alpha, opt.value, opt.tau_opt};
          });
  t.run(o.threads, r);

  const std::size_t alpha_c = t.column("alpha"), rate_c = t.column("rate");
  for (const Marker& m : markers) {
    const auto pts = t.series(label({{"b", bits_value(m.b)}}, m.known ? "marker known" : "marker trained"));
    const bool ok = !pts.empty() && pts[0].ok && std::abs(pts[0].v[alpha_c] / m.expected - 1.0) <= 0.15;
    expect(r,
           std::string("90% marker, a=2, 10 dB, ") + (m.known ? "known" : "trained") + " channel, b=" +
               m.b.to_string() + ": alpha within 15% of " + fmt(m.expected),
           ok, pts.empty() || !pts[0].ok ? "not computed" : "alpha = " + fmt(pts[0].v[alpha_c]), true);
  }
  bool ceiling_ok = true, order_ok = true, monotone_ok = true;
  std::string ceiling_detail, order_detail, monotone_detail;
  for (double snr : {0.0, 10.0})
    for (Resolution a : kA12Inf)
      for (Resolution b : kB1Inf) {
        const auto tr = t.series(label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}}, "trained"));
        const auto kn = t.series(label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}}, "known"));
        for (std::size_t i = 0; i < tr.size(); ++i) {
          if (!tr[i].ok || !kn[i].ok) continue;
          if (!a.is_infinite() && std::max(tr[i].v[rate_c], kn[i].v[rate_c]) > 2.0 * a.bits() + 1e-9) {
            ceiling_ok = false;
            ceiling_detail = "a=" + a.to_string() + " alpha=" + fmt(tr[i].v[alpha_c]);
          }
          if (tr[i].v[rate_c] > kn[i].v[rate_c] + 1e-9) {
            order_ok = false;
            order_detail = "alpha=" + fmt(tr[i].v[alpha_c]) + " trained " + fmt(tr[i].v[rate_c]) + " > known " +
                           fmt(kn[i].v[rate_c]);
          }
        }
        for (const auto* pts : {&tr, &kn}) {
          const std::string v = monotone_violation(*pts, 0, rate_c, +1, 1e-7);
          if (!v.empty()) {
            monotone_ok = false;
            monotone_detail = label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}}) + " " + v;
          }
        }
      }
  expect(r, "rates never exceed the saturation rate 2a", ceiling_ok, ceiling_detail);
  expect(r, "trained-channel rate <= known-channel rate pointwise", order_ok, order_detail);
  expect(r, "rates nondecreasing in alpha", monotone_ok, monotone_detail);

  // No saturation for a Gaussian input: above the a=2 ceiling at the top of the axis.
  const auto top = t.series(label({{"snr", 10.0}, {"a", kInf}, {"b", 1.0}}, "trained"));
  const bool grows = !top.empty() && top.back().ok && top.back().v[rate_c] > 4.0;
  expect(r, "a=inf keeps growing past 2a=4 (no saturation), b=1, 10 dB", grows,
         top.empty() ? "" : "rate at alpha=" + fmt(top.back().v[alpha_c]) + " is " + fmt(top.back().v[rate_c]), true);
}

// ---------------------------------------------------------------------------
// fig2: tau_opt vs alpha

void fig2(const PresetOptions& o, PresetReport& r) {
  const auto alphas = o.alpha.empty() ? log_grid(0.1, 1000.0, 33) : o.alpha;
  const auto& num = o.numerics;
  Table t({"kind", "snr_db", "a", "b"}, {"alpha", "rate", "tau_opt", "tau_beta", "tau_formula"});
  for (double snr : {0.0, 10.0})
    for (Resolution a : kA12Inf)
      for (Resolution b : kB1Inf) {
        const std::string s = label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}}, "curve");
        for (double alpha : alphas)
          t.add(s, {std::string("curve"), snr, bits_value(a), bits_value(b)}, [=, &num]() -> std::vector<double> {
            const TrainingOptimum opt = optimize_training(base_config(db_to_rho(snr), alpha, b, a), num);
            return {alpha, opt.value, opt.tau_opt, opt.tau_opt * kBeta, kNaN};
          });
      }
  for (double snr : {0.0, 10.0})
    for (Resolution a : {Resolution::finite(1), Resolution::finite(2)})
      for (Resolution b : kB1Inf)
        t.add(label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}}, "marker"),
              {std::string("marker90"), snr, bits_value(a), bits_value(b)}, [=, &num]() -> std::vector<double> {
                SystemConfig c = base_config(db_to_rho(snr), 1.0, b, a);
                c.alpha = required_alpha_for_rate(0.9 * 2.0 * a.bits(), c, false, num).alpha;
                const TrainingOptimum opt = optimize_training(c, num);
                return {c.alpha, opt.value, opt.tau_opt, opt.tau_opt * kBeta, kNaN};
              });
  for (Resolution b : kB1Inf)
    for (double alpha : {1e3, 2e3, 5e3, 1e4})
      t.add(label({{"b", bits_value(b)}}, "large"), {std::string("large_alpha"), 10.0, 1.0, bits_value(b)},
            [=, &num]() -> std::vector<double> {
              const TrainingOptimum opt = optimize_training(base_config(10.0, alpha, b, Resolution::finite(1)), num);
              return {alpha, opt.value, opt.tau_opt, opt.tau_opt * kBeta, large_alpha_tau_opt(10.0, kBeta, alpha, b)};
            });
  t.run(o.threads, r);

  const std::size_t alpha_c = t.column("alpha"), tau_c = t.column("tau_opt"), tb_c = t.column("tau_beta"),
                    f_c = t.column("tau_formula");
  for (double snr : {0.0, 10.0})
    for (Resolution a : {Resolution::finite(1), Resolution::finite(2)})
      for (Resolution b : kB1Inf) {
        const auto pts = t.series(label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}}, "marker"));
        const bool ok = !pts.empty() && pts[0].ok && std::abs(pts[0].v[tau_c] - 0.07) <= 0.02;
        expect(r,
               "tau_opt at the 90% marker within 0.07 +- 0.02, " +
                   label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}}),
               ok,
               pts.empty() || !pts[0].ok ? "not computed"
                                         : "alpha = " + fmt(pts[0].v[alpha_c]) + ", tau_opt = " + fmt(pts[0].v[tau_c]),
               true);
      }
  bool below_one = false, decays = true;
  std::string decay_detail;
  for (double snr : {0.0, 10.0})
    for (Resolution a : {Resolution::finite(1), Resolution::finite(2)})
      for (Resolution b : kB1Inf) {
        const auto pts = t.series(label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}}, "curve"));
        for (const Point& p : pts)
          if (p.ok && p.v[tb_c] < 1.0) below_one = true;
        // tau_opt falls as R_opt approaches saturation: last point below the peak.
        double peak = 0.0;
        for (const Point& p : pts)
          if (p.ok) peak = std::max(peak, p.v[tau_c]);
        if (!pts.empty() && pts.back().ok && !(pts.back().v[tau_c] < peak)) {
          decays = false;
          decay_detail = label({{"snr", snr}, {"a", bits_value(a)}, {"b", bits_value(b)}});
        }
      }
  expect(r, "tau_opt * beta < 1 is reached inside the alpha range", below_one, "", true);
  expect(r, "tau_opt decreases toward the top of the alpha range (finite a)", decays, decay_detail, true);
  for (Resolution b : kB1Inf)
    for (const Point& p : t.series(label({{"b", bits_value(b)}}, "large"))) {
      const double ratio = p.v[tau_c] / p.v[f_c];
      expect(r, "large-alpha tau_opt formula within 25%, b=" + b.to_string() + " alpha=" + fmt(p.v[alpha_c]),
             p.ok && std::abs(ratio - 1.0) <= 0.25,
             "numerical " + fmt(p.v[tau_c]) + ", formula " + fmt(p.v[f_c]) + ", ratio " + fmt(ratio));
    }
}

// ---------------------------------------------------------------------------
// fig3 / fig11: required alpha vs SNR with the rho = inf asymptote

void asymptote_checks(PresetReport& r, const Table& t, const std::string& prefix, Resolution b, const char* tail,
                      std::size_t alpha_c, std::size_t below_c) {
  const auto pts = t.series(label({{"b", bits_value(b)}}, tail));
  const std::string v = monotone_violation(pts, 0, alpha_c, -1, 2e-3);
  expect(r, prefix + " nonincreasing in SNR, b=" + b.to_string() + (tail[0] ? std::string(" ") + tail : ""), v.empty(),
         v);
  const auto inf_pt = find_point(pts, 0, kInf);
  if (!inf_pt) return;
  if (b.is_infinite()) {
    expect(r, prefix + " has no floor at rho=inf for b=inf (alpha -> 0)" + (tail[0] ? std::string(", ") + tail : ""),
           inf_pt->ok && inf_pt->v[below_c] == 1.0, inf_pt->ok ? "alpha = " + fmt(inf_pt->v[alpha_c]) : "failed",
           true);
  } else {
    expect(r,
           prefix + " has a finite positive floor at rho=inf, b=" + b.to_string() +
               (tail[0] ? std::string(", ") + tail : ""),
           inf_pt->ok && inf_pt->v[below_c] == 0.0 && inf_pt->v[alpha_c] > 0.0 && std::isfinite(inf_pt->v[alpha_c]),
           inf_pt->ok ? "alpha = " + fmt(inf_pt->v[alpha_c]) : "failed", true);
  }
}

void fig3(const PresetOptions& o, PresetReport& r) {
  const auto snrs = snr_axis(o, -10.0, 30.0, true);
  const auto& num = o.numerics;
  Table t({"snr_db", "b", "channel"}, {"alpha", "below_bracket"});
  for (Resolution b : kB123Inf)
    for (bool known : {false, true})
      for (double snr : snrs)
        t.add(label({{"b", bits_value(b)}}, known ? "known" : "trained"),
              {snr, bits_value(b), std::string(known ? "known" : "trained")}, [=, &num]() -> std::vector<double> {
                const SystemConfig c = base_config(db_to_rho(snr), 1.0, b, Resolution::finite(1));
                const AlphaSearchResult res = required_alpha_for_rate(1.8, c, known, num);
                return {res.alpha, res.below_bracket ? 1.0 : 0.0};
              });
  t.run(o.threads, r);
  const std::size_t alpha_c = t.column("alpha"), below_c = t.column("below_bracket");
  for (Resolution b : kB123Inf)
    for (const char* ch : {"trained", "known"}) asymptote_checks(r, t, "alpha for R=1.8", b, ch, alpha_c, below_c);
  for (Resolution b : {Resolution::finite(1), Resolution::finite(2), Resolution::finite(3)}) {
    const auto tr = find_point(t.series(label({{"b", bits_value(b)}}, "trained")), 0, kInf);
    const auto kn = find_point(t.series(label({{"b", bits_value(b)}}, "known")), 0, kInf);
    if (!tr || !kn) continue;
    expect(r, "trained-channel floor above known-channel floor, b=" + b.to_string(),
           tr->ok && kn->ok && tr->v[alpha_c] > kn->v[alpha_c],
           "trained " + fmt(tr->v[alpha_c]) + ", known " + fmt(kn->v[alpha_c]), true);
  }
}

// ---------------------------------------------------------------------------
// fig4: R_opt vs the linearized (Bussgang) rate R_L

void fig4(const PresetOptions& o, PresetReport& r) {
  const auto snrs = snr_axis(o, -10.0, 30.0, false);
  const auto& num = o.numerics;
  Table t({"alpha", "a", "b", "snr_db"}, {"r_opt", "tau_opt", "r_l", "tau_l"});
  for (double alpha : {10.0, 0.1})
    for (Resolution a : kA12Inf)
      for (int bits : {1, 2})
        for (double snr : snrs)
          t.add(label({{"alpha", alpha}, {"a", bits_value(a)}, {"b", double(bits)}}),
                {alpha, bits_value(a), double(bits), snr}, [=, &num]() -> std::vector<double> {
                  const double rho = db_to_rho(snr);
                  const SystemConfig c = base_config(rho, alpha, Resolution::finite(bits), a);
                  const TrainingOptimum opt = optimize_training(c, num);
                  const BussgangRate lin = bussgang_rate(rho, alpha, kBeta, bits, c.input_prior(), num);
                  return {opt.value, opt.tau_opt, lin.optimum.value, lin.optimum.tau_opt};
                });
  t.run(o.threads, r);
  const std::size_t ro = t.column("r_opt"), rl = t.column("r_l");
  {
    const auto pts = t.series(label({{"alpha", 10.0}, {"a", 1.0}, {"b", 1.0}}));
    double worst = 0.0;
    bool ok = !pts.empty();
    for (const Point& p : pts) {
      if (key_number(p, 3) > 6.0) continue;
      if (!p.ok) {
        ok = false;
        continue;
      }
      worst = std::max(worst, std::abs(p.v[rl] - p.v[ro]));
    }
    expect(r, "alpha=10, a=1, b=1: |R_L - R_opt| <= 0.1 bit for SNR <= 6 dB", ok && worst <= 0.1,
           "largest gap " + fmt(worst), true);
  }
  for (int bits : {1, 2}) {
    const auto p1 = t.series(label({{"alpha", 0.1}, {"a", 1.0}, {"b", double(bits)}}));
    const auto p2 = t.series(label({{"alpha", 0.1}, {"a", 2.0}, {"b", double(bits)}}));
    double worst = 0.0;
    bool ok = !p1.empty();
    for (std::size_t i = 0; i < p1.size(); ++i) {
      if (!p1[i].ok || !p2[i].ok) {
        ok = false;
        continue;
      }
      worst = std::max({worst, std::abs(p1[i].v[ro] - p2[i].v[ro]), std::abs(p1[i].v[rl] - p2[i].v[rl])});
    }
    expect(r, "alpha=0.1, b=" + std::to_string(bits) + ": R_opt and R_L insensitive to a (a=1 vs a=2 within 0.05 bit)",
           ok && worst <= 0.05, "largest gap " + fmt(worst), true);
  }
}

// ---------------------------------------------------------------------------
// fig5 / fig6: dependence on the blocklength ratio beta

std::vector<double> beta_axis(const PresetOptions& o) {
  if (!o.beta.empty()) return o.beta;
  return {10, 15, 20, 25, 30, 35, 40, 50, 60, 80, 100, 150, 200};
}

void fig5(const PresetOptions& o, PresetReport& r) {
  const auto betas = beta_axis(o);
  const auto& num = o.numerics;
  Table t({"snr_db", "b", "beta"}, {"alpha", "below_bracket"});
  for (double snr : {0.0, 10.0})
    for (Resolution b : kB123Inf)
      for (double beta : betas)
        t.add(label({{"snr", snr}, {"b", bits_value(b)}}), {snr, bits_value(b), beta},
              [=, &num]() -> std::vector<double> {
                SystemConfig c = base_config(db_to_rho(snr), 1.0, b, Resolution::finite(1));
                c.beta = beta;
                const AlphaSearchResult res = required_alpha_for_rate(1.8, c, false, num);
                return {res.alpha, res.below_bracket ? 1.0 : 0.0};
              });
  t.run(o.threads, r);
  const std::size_t alpha_c = t.column("alpha");
  for (double snr : {0.0, 10.0})
    for (Resolution b : kB123Inf) {
      const auto pts = t.series(label({{"snr", snr}, {"b", bits_value(b)}}));
      const std::string v = monotone_violation(pts, 2, alpha_c, -1, 2e-3);
      expect(r, "alpha for R=1.8 nonincreasing in beta, " + label({{"snr", snr}, {"b", bits_value(b)}}), v.empty(), v,
             true);
      // Steeper below beta = 40 than above, on a log scale per unit beta.
      const Point* lo = nullptr;
      const auto mid = find_point(pts, 2, 40.0);
      const Point* hi = nullptr;
      for (const Point& p : pts) {
        if (!p.ok) continue;
        if (!lo) lo = &p;
        hi = &p;
      }
      if (lo && mid && hi && mid->ok && key_number(*lo, 2) < 40.0 && key_number(*hi, 2) > 40.0) {
        const double s_lo = std::log(lo->v[alpha_c] / mid->v[alpha_c]) / (40.0 - key_number(*lo, 2));
        const double s_hi = std::log(mid->v[alpha_c] / hi->v[alpha_c]) / (key_number(*hi, 2) - 40.0);
        expect(r, "alpha changes faster with beta for beta <= 40, " + label({{"snr", snr}, {"b", bits_value(b)}}),
               s_lo > s_hi, "log-slope below 40: " + fmt(s_lo) + ", above: " + fmt(s_hi), true);
      }
    }
}

void fig6(const PresetOptions& o, PresetReport& r) {
  const auto betas = beta_axis(o);
  const auto& num = o.numerics;
  Table t({"kind", "snr_db", "b", "beta"}, {"alpha", "tau_opt", "r_opt"});
  struct Curve {
    double snr;
    Resolution b;
  };
  std::vector<Curve> curves;
  for (double snr : {0.0, 10.0})
    for (Resolution b : kB12Inf) curves.push_back({snr, b});
  // Reference alpha: R_opt = 1.8 at beta = 40.
  for (const Curve& cv : curves)
    t.add(label({{"snr", cv.snr}, {"b", bits_value(cv.b)}}, "reference"),
          {std::string("reference"), cv.snr, bits_value(cv.b), kBeta}, [cv, &num]() -> std::vector<double> {
            SystemConfig c = base_config(db_to_rho(cv.snr), 1.0, cv.b, Resolution::finite(1));
            c.alpha = required_alpha_for_rate(1.8, c, false, num).alpha;
            const TrainingOptimum opt = optimize_training(c, num);
            return {c.alpha, opt.tau_opt, opt.value};
          });
  t.run(o.threads, r);
  const std::size_t alpha_c = t.column("alpha"), tau_c = t.column("tau_opt"), rate_c = t.column("r_opt");
  for (const Curve& cv : curves) {
    const auto ref = t.series(label({{"snr", cv.snr}, {"b", bits_value(cv.b)}}, "reference"));
    const bool have = !ref.empty() && ref[0].ok;
    const double alpha = have ? ref[0].v[alpha_c] : kNaN;
    for (double beta : betas)
      t.add(label({{"snr", cv.snr}, {"b", bits_value(cv.b)}}), {std::string("curve"), cv.snr, bits_value(cv.b), beta},
            [cv, alpha, beta, have, &num]() -> std::vector<double> {
              if (!have) throw std::runtime_error("reference alpha unavailable");
              SystemConfig c = base_config(db_to_rho(cv.snr), alpha, cv.b, Resolution::finite(1));
              c.beta = beta;
              const TrainingOptimum opt = optimize_training(c, num);
              return {alpha, opt.tau_opt, opt.value};
            });
  }
  t.run(o.threads, r);
  for (const Curve& cv : curves) {
    const std::string name = label({{"snr", cv.snr}, {"b", bits_value(cv.b)}});
    const auto pts = t.series(name);
    std::string v = monotone_violation(pts, 3, tau_c, -1, 1e-3);
    expect(r, "tau_opt nonincreasing in beta, " + name, v.empty(), v, true);
    v = monotone_violation(pts, 3, rate_c, +1, 1e-6);
    expect(r, "R_opt nondecreasing in beta, " + name, v.empty(), v, true);
  }
  // Both quantities depend mainly on beta: spread across b and SNR at each beta.
  double worst_rate = 0.0, worst_tau = 0.0;
  for (double beta : betas) {
    double rmin = kInf, rmax = -kInf, tmin = kInf, tmax = -kInf;
    for (const Curve& cv : curves) {
      const auto p = find_point(t.series(label({{"snr", cv.snr}, {"b", bits_value(cv.b)}})), 3, beta);
      if (!p || !p->ok) continue;
      rmin = std::min(rmin, p->v[rate_c]);
      rmax = std::max(rmax, p->v[rate_c]);
      tmin = std::min(tmin, p->v[tau_c]);
      tmax = std::max(tmax, p->v[tau_c]);
    }
    if (rmax >= rmin) {
      worst_rate = std::max(worst_rate, rmax - rmin);
      worst_tau = std::max(worst_tau, tmax / tmin - 1.0);
    }
  }
  expect(r, "R_opt insensitive to b and SNR at fixed beta (spread <= 0.15 bit)", worst_rate <= 0.15,
         "largest spread " + fmt(worst_rate), true);
  expect(r, "tau_opt insensitive to b and SNR at fixed beta (max/min - 1 <= 0.5)", worst_tau <= 0.5,
         "largest relative spread " + fmt(worst_tau), true);
}

// ---------------------------------------------------------------------------
// fig7: small-alpha rate per receiver vs tau

void fig7(const PresetOptions& o, PresetReport& r) {
  const std::vector<double> taus = step_grid(0.005, 0.5, 0.005);
  const auto& num = o.numerics;
  const double small_alpha = 0.1;
  Table t({"kind", "snr_db", "b", "tau"}, {"rate_per_rx", "tau_opt"});
  for (double snr : {0.0, 10.0, kInf})
    for (Resolution b : kB123Inf) {
      const std::string s = label({{"snr", snr}, {"b", bits_value(b)}}, "approx");
      for (double tau : taus)
        t.add(s, {std::string("approx"), snr, bits_value(b), tau}, [=, &num]() -> std::vector<double> {
          return {small_alpha_rate(tau, db_to_rho(snr), 1.0, kBeta, b, num), kNaN};
        });
      t.add(s + " opt", {std::string("approx_opt"), snr, bits_value(b), kNaN}, [=, &num]() -> std::vector<double> {
        const TrainingOptimum opt = small_alpha_tau_opt(db_to_rho(snr), 1.0, kBeta, b, num);
        return {opt.value, opt.tau_opt};
      });
    }
  for (Resolution b : kB123Inf) {
    const std::string s = label({{"snr", 10.0}, {"b", bits_value(b)}}, "exact");
    for (double tau : taus)
      t.add(s, {std::string("exact"), 10.0, bits_value(b), tau}, [=, &num]() -> std::vector<double> {
        return {trained_rate(base_config(10.0, small_alpha, b, Resolution::finite(1)), tau, num) / small_alpha, kNaN};
      });
    t.add(s + " opt", {std::string("exact_opt"), 10.0, bits_value(b), kNaN}, [=, &num]() -> std::vector<double> {
      const TrainingOptimum opt = optimize_training(base_config(10.0, small_alpha, b, Resolution::finite(1)), num);
      return {opt.value / small_alpha, opt.tau_opt};
    });
  }
  t.run(o.threads, r);
  const std::size_t rate_c = t.column("rate_per_rx");
  for (Resolution b : kB123Inf) {
    const auto ex = t.series(label({{"snr", 10.0}, {"b", bits_value(b)}}, "exact"));
    const auto ap = t.series(label({{"snr", 10.0}, {"b", bits_value(b)}}, "approx"));
    double worst = 0.0;
    bool ok = !ex.empty();
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (!ex[i].ok || !ap[i].ok) {
        ok = false;
        continue;
      }
      worst = std::max(worst, std::abs(ex[i].v[rate_c] / ap[i].v[rate_c] - 1.0));
    }
    expect(r, "alpha=0.1 exact rate overlaps the small-alpha approximation within 5%, 10 dB, b=" + b.to_string(),
           ok && worst <= 0.05, "largest relative gap " + fmt(worst), true);
  }
  for (Resolution b : {Resolution::finite(1), Resolution::finite(2), Resolution::finite(3)}) {
    double top = 0.0;
    bool ok = true;
    for (const Point& p : t.series(label({{"snr", kInf}, {"b", bits_value(b)}}, "approx"))) {
      ok = ok && p.ok;
      if (p.ok) top = std::max(top, p.v[rate_c]);
    }
    expect(r, "rate per receiver stays below 2b at rho=inf, b=" + b.to_string(), ok && top < 2.0 * b.bits(),
           "largest " + fmt(top), true);
  }
  {
    bool ok = true;
    std::string detail;
    for (const Point& p : t.series(label({{"snr", kInf}, {"b", kInf}}, "approx"))) {
      const double tau = key_number(p, 3);
      if (std::abs(tau * kBeta - 1.0) < 1e-9) continue;  // the transition point itself
      const bool inf_rate = p.ok && std::isinf(p.v[rate_c]);
      const bool expect_inf = tau * kBeta > 1.0;
      if (!p.ok || inf_rate != expect_inf) {
        ok = false;
        detail = "tau=" + fmt(tau);
      }
    }
    expect(r, "b=inf, rho=inf: rate is infinite exactly when tau > 1/beta", ok, detail, true);
  }
  {
    // Going from b=1 to b=3 helps more at 10 dB than at 0 dB (compared at the optimum).
    const auto gain = [&](double snr) {
      const auto p1 = t.series(label({{"snr", snr}, {"b", 1.0}}, "approx opt"));
      const auto p3 = t.series(label({{"snr", snr}, {"b", 3.0}}, "approx opt"));
      if (p1.empty() || p3.empty() || !p1[0].ok || !p3[0].ok) return kNaN;
      return p3[0].v[rate_c] - p1[0].v[rate_c];
    };
    const double g0 = gain(0.0), g10 = gain(10.0);
    expect(r, "more ADC bits help more at high SNR (b=1 -> 3 gain at 10 dB exceeds 0 dB)", g10 > g0,
           "gain at 0 dB " + fmt(g0) + ", at 10 dB " + fmt(g10), true);
  }
}

// ---------------------------------------------------------------------------
// fig8: GAMP2 Monte Carlo vs SER theory

void fig8(const PresetOptions& o, PresetReport& r) {
  const std::vector<double> snrs = o.snr_db.empty() ? std::vector<double>{-10, -5, 0, 5, 10, 15, 20} : o.snr_db;
  const auto& num = o.numerics;
  Table t({"snr_db", "b"}, {"ser_theory", "simulated", "ser_sim", "std_error", "n_trials", "diverged_trials",
                            "mse_g_theory", "mse_g_empirical"});
  std::uint64_t index = 0;
  for (Resolution b : kB123Inf)
    for (double snr : snrs) {
      const std::uint64_t seed = trial_seed(o.seed, index++);
      t.add(label({{"b", bits_value(b)}}), {snr, bits_value(b)}, [=, &o, &num]() -> std::vector<double> {
        TrialConfig cfg;
        cfg.rho = db_to_rho(snr);
        cfg.adc = b;
        const double theory = ser_pipeline({cfg.rho, b, std::nullopt}, cfg.alpha, cfg.tau_prime, num).ser;
        if (theory < 0.005) return {theory, 0.0, kNaN, kNaN, 0.0, 0.0, theory_channel_mse(cfg, num), kNaN};
        const McResult mc = monte_carlo_ser(cfg, o.n_trials, seed, o.threads, num);
        return {theory, 1.0, mc.mean_ser, mc.std_error, double(mc.n_trials), double(mc.diverged_trials), mc.mse_g,
                mc.mean_channel_mse};
      });
    }
  // Trials are parallel inside each point.
  t.run(1, r);
  const std::size_t th = t.column("ser_theory"), sim = t.column("simulated"), ss = t.column("ser_sim"),
                    mt = t.column("mse_g_theory"), me = t.column("mse_g_empirical");
  for (Resolution b : kB123Inf)
    for (const Point& p : t.series(label({{"b", bits_value(b)}}))) {
      if (!p.ok || p.v[sim] != 1.0) continue;
      const double gap = std::abs(p.v[ss] - p.v[th]);
      expect(r, "|simulated - theory| <= 0.005, b=" + b.to_string() + " snr=" + fmt(key_number(p, 0)) + " dB",
             gap <= 0.005, "theory " + fmt(p.v[th]) + ", simulated " + fmt(p.v[ss]) + ", gap " + fmt(gap));
      if (p.v[mt] > 0.0) {
        const double rel = std::abs(p.v[me] / p.v[mt] - 1.0);
        expect(r, "empirical channel MSE within 5% of theory, b=" + b.to_string() + " snr=" + fmt(key_number(p, 0)),
               rel <= 0.05, "theory " + fmt(p.v[mt]) + ", empirical " + fmt(p.v[me]));
      }
    }
}

// ---------------------------------------------------------------------------
// fig9: SER vs alpha

void fig9(const PresetOptions& o, PresetReport& r) {
  const auto alphas = o.alpha.empty() ? log_grid(1.0, 1000.0, 31) : o.alpha;
  const std::vector<double> tps{0.25, 0.5, 1.0, 2.0, 4.0};
  const auto& num = o.numerics;
  Table t({"b", "tau_prime", "alpha"}, {"ser", "qtilde_x"});
  for (Resolution b : kB1Inf)
    for (double tp : tps)
      for (double alpha : alphas)
        t.add(label({{"b", bits_value(b)}, {"tau_prime", tp}}), {bits_value(b), tp, alpha},
              [=, &num]() -> std::vector<double> {
                const SerReport s = ser_pipeline({10.0, b, std::nullopt}, alpha, tp, num);
                return {s.ser, s.qtilde_x};
              });
  t.run(o.threads, r);
  const std::size_t ser_c = t.column("ser");
  for (Resolution b : kB1Inf) {
    for (double tp : tps) {
      const auto pts = t.series(label({{"b", bits_value(b)}, {"tau_prime", tp}}));
      const std::string v = monotone_violation(pts, 2, ser_c, -1, 1e-9);
      expect(r, "SER nonincreasing in alpha, " + label({{"b", bits_value(b)}, {"tau_prime", tp}}), v.empty(), v);
      if (!pts.empty() && pts.back().ok && key_number(pts.back(), 2) >= 1000.0)
        expect(r, "SER below 1e-3 at alpha=" + fmt(key_number(pts.back(), 2)) + ", " +
                      label({{"b", bits_value(b)}, {"tau_prime", tp}}),
               pts.back().v[ser_c] < 1e-3, "SER " + fmt(pts.back().v[ser_c]), true);
    }
    // More training never hurts.
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < alphas.size(); ++i)
      for (std::size_t k = 1; k < tps.size(); ++k) {
        const auto a = t.series(label({{"b", bits_value(b)}, {"tau_prime", tps[k - 1]}}));
        const auto c = t.series(label({{"b", bits_value(b)}, {"tau_prime", tps[k]}}));
        if (a[i].ok && c[i].ok && c[i].v[ser_c] > a[i].v[ser_c] * (1.0 + 1e-9) + 1e-300) {
          ok = false;
          detail = "alpha=" + fmt(alphas[i]) + " tau_prime=" + fmt(tps[k]);
        }
      }
    expect(r, "SER nonincreasing in tau_prime, b=" + b.to_string(), ok, detail);
  }
}

// ---------------------------------------------------------------------------
// fig10: training needed for 1% SER vs SNR

void fig10(const PresetOptions& o, PresetReport& r) {
  const auto snrs = snr_axis(o, -5.0, 30.0, true);
  const auto& num = o.numerics;
  Table t({"kind", "alpha", "b", "snr_db"}, {"tau_prime", "below_bracket", "critical_snr_db"});
  for (double alpha : {10.0, 40.0})
    for (Resolution b : kB12Inf) {
      for (double snr : snrs)
        t.add(label({{"alpha", alpha}, {"b", bits_value(b)}}), {std::string("curve"), alpha, bits_value(b), snr},
              [=, &num]() -> std::vector<double> {
                const SearchResult s = required_tau_prime_for_ser(0.01, {db_to_rho(snr), b, std::nullopt}, alpha, num);
                return {s.value, s.below_bracket ? 1.0 : 0.0, kNaN};
              });
      t.add(label({{"alpha", alpha}, {"b", bits_value(b)}}, "critical"),
            {std::string("critical"), alpha, bits_value(b), kNaN},
            [=, &num]() -> std::vector<double> { return {2.0, 0.0, critical_snr_db(alpha, b, num)}; });
    }
  t.run(o.threads, r);
  const std::size_t tp_c = t.column("tau_prime"), crit_c = t.column("critical_snr_db");
  for (double alpha : {10.0, 40.0})
    for (Resolution b : kB12Inf) {
      const std::string name = label({{"alpha", alpha}, {"b", bits_value(b)}});
      const auto pts = t.series(name);
      const std::string v = monotone_violation(pts, 3, tp_c, -1, 2e-3);
      expect(r, "tau_prime for 1% SER nonincreasing in SNR, " + name, v.empty(), v, true);
      const Point* first = nullptr;
      const Point* last = nullptr;
      for (const Point& p : pts)
        if (p.ok && std::isfinite(key_number(p, 3))) {
          if (!first) first = &p;
          last = &p;
        }
      if (first && last && first != last)
        expect(r, "tau_prime grows sharply at low SNR (10x over the axis), " + name,
               first->v[tp_c] >= 10.0 * last->v[tp_c],
               "tau_prime " + fmt(first->v[tp_c]) + " at " + fmt(key_number(*first, 3)) + " dB vs " +
                   fmt(last->v[tp_c]) + " at " + fmt(key_number(*last, 3)) + " dB",
               true);
      if (const auto inf_pt = find_point(pts, 3, kInf))
        expect(r, "finite tau_prime floor at rho=inf, " + name,
               inf_pt->ok && inf_pt->v[tp_c] > 0.0 && std::isfinite(inf_pt->v[tp_c]),
               inf_pt->ok ? "tau_prime = " + fmt(inf_pt->v[tp_c]) : "failed", true);
    }
  const auto crit = [&](double alpha, Resolution b) {
    const auto p = t.series(label({{"alpha", alpha}, {"b", bits_value(b)}}, "critical"));
    return p.empty() || !p[0].ok ? kNaN : p[0].v[crit_c];
  };
  for (Resolution b : kB12Inf)
    expect(r, "alpha 10 -> 40 lowers the critical SNR, b=" + b.to_string(), crit(40.0, b) < crit(10.0, b),
           fmt(crit(10.0, b)) + " dB -> " + fmt(crit(40.0, b)) + " dB", true);
  for (double alpha : {10.0, 40.0})
    for (std::size_t k = 1; k < kB12Inf.size(); ++k)
      expect(r,
             "more ADC bits lower the critical SNR, alpha=" + fmt(alpha) + ", b=" + kB12Inf[k - 1].to_string() +
                 " -> " + kB12Inf[k].to_string(),
             crit(alpha, kB12Inf[k]) < crit(alpha, kB12Inf[k - 1]),
             fmt(crit(alpha, kB12Inf[k - 1])) + " dB -> " + fmt(crit(alpha, kB12Inf[k])) + " dB", true);
}

// ---------------------------------------------------------------------------
// fig11: alpha needed for 1% SER at tau_prime = 2

void fig11(const PresetOptions& o, PresetReport& r) {
  const auto snrs = snr_axis(o, -10.0, 30.0, true);
  const auto& num = o.numerics;
  Table t({"snr_db", "b"}, {"alpha", "below_bracket"});
  for (Resolution b : kB123Inf)
    for (double snr : snrs)
      t.add(label({{"b", bits_value(b)}}, ""), {snr, bits_value(b)}, [=, &num]() -> std::vector<double> {
        const SearchResult s = required_alpha_for_ser(0.01, {db_to_rho(snr), b, std::nullopt}, 2.0, num);
        return {s.value, s.below_bracket ? 1.0 : 0.0};
      });
  t.run(o.threads, r);
  for (Resolution b : kB123Inf)
    asymptote_checks(r, t, "alpha for 1% SER", b, "", t.column("alpha"), t.column("below_bracket"));
}

using PresetFn = void (*)(const PresetOptions&, PresetReport&);

struct Entry {
  PresetInfo info;
  PresetFn fn;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {{"fig1", "R_opt and R_known vs alpha; a in {1,2,inf}, b in {1,inf}, 0/10 dB, beta=40"}, fig1},
      {{"fig2", "tau_opt vs alpha with 90% markers and the large-alpha formulas"}, fig2},
      {{"fig3", "alpha for R_opt=1.8 vs SNR, trained and known channel, b in {1,2,3,inf}"}, fig3},
      {{"fig4", "R_opt vs linearized R_L vs SNR at alpha=10 and alpha=0.1"}, fig4},
      {{"fig5", "alpha for R_opt=1.8 vs beta, 0/10 dB"}, fig5},
      {{"fig6", "tau_opt and R_opt vs beta at the alpha fixed by beta=40"}, fig6},
      {{"fig7", "small-alpha rate per receiver vs tau, with exact alpha=0.1 curves"}, fig7},
      {{"fig8", "GAMP2 Monte Carlo SER vs theory, M=50, alpha=5, tau'=2"}, fig8},
      {{"fig9", "SER vs alpha at 10 dB for several tau'"}, fig9},
      {{"fig10", "tau' for 1% SER vs SNR, alpha in {10,40}"}, fig10},
      {{"fig11", "alpha for 1% SER vs SNR at tau'=2"}, fig11},
  };
  return entries;
}

}  // namespace

bool PresetReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.passed; });
}

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> list = [] {
    std::vector<PresetInfo> out;
    for (const Entry& e : registry()) out.push_back(e.info);
    return out;
  }();
  return list;
}

bool has_preset(std::string_view id) {
  const auto& reg = registry();
  return std::any_of(reg.begin(), reg.end(), [&](const Entry& e) { return e.info.id == id; });
}

PresetReport run_preset(std::string_view id, const PresetOptions& options) {
  for (const Entry& e : registry()) {
    if (e.info.id != id) continue;
    PresetReport report;
    report.id = e.info.id;
    e.fn(options, report);
    std::ostringstream detail;
    detail << report.failed_points << " of " << report.points << " points failed";
    report.assertions.push_back({"point failures <= 2%", report.failed_points <= 0.02 * report.points, detail.str(),
                                 false});
    return report;
  }
  throw std::invalid_argument("unknown preset id: " + std::string(id));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::to_string(std::get<std::int64_t>(c));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

nlohmann::json cell_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) {
    // JSON has no inf/nan; keep them as strings so nothing is lost.
    if (!std::isfinite(*d)) return format_double(*d);
    return *d;
  }
  return std::get<std::int64_t>(c);
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.columns.size(); ++i) out << (i ? "," : "") << csv_field(data.columns[i]);
  out << "\r\n";
  for (const auto& row : data.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(cell_text(row[i]));
    out << "\r\n";
  }
}

void write_json_lines(std::ostream& out, const PresetReport& report) {
  for (const auto& row : report.data.rows) {
    nlohmann::ordered_json j;
    j["preset"] = report.id;
    j["type"] = "row";
    for (std::size_t i = 0; i < row.size() && i < report.data.columns.size(); ++i)
      j[report.data.columns[i]] = cell_json(row[i]);
    out << j.dump() << '\n';
  }
  for (const auto& a : report.assertions) {
    nlohmann::ordered_json j;
    j["preset"] = report.id;
    j["type"] = "assertion";
    j["name"] = a.name;
    j["passed"] = a.passed;
    j["caption_derived"] = a.caption_derived;
    j["detail"] = a.detail;
    out << j.dump() << '\n';
  }
}

}  // namespace qlst
