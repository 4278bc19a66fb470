#pragma once

#include "qlst/gamp_sim.hpp"
#include "qlst/rate_optimizer.hpp"
#include "qlst/replica.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace qlst {

/// Everything a CLI run needs, as read from (and written back to) JSON.
/// Sections: system, targets, simulation, solver, quadrature, optimizer, gamp.
struct RunConfig {
  // system
  double rho_db = 10.0;  // +inf allowed ("inf" in JSON)
  double sigma2 = 1.0;
  double alpha = 4.0;
  double beta = 40.0;
  std::optional<double> tau;
  std::optional<double> tau_prime;
  Resolution adc = Resolution::finite(1);
  Resolution dac = Resolution::finite(1);
  std::optional<double> step;
  std::optional<double> mse_g;  // skips the training solve in `analyze`

  // targets: when set, optimize solves for alpha and ser for tau_prime and alpha
  std::optional<double> target_rate;
  std::optional<double> target_ser;

  // simulation (Monte Carlo uses its own alpha and training load)
  int transmitters = 50;
  double sim_alpha = 5.0;
  double sim_tau_prime = 2.0;
  int n_trials = 10000;
  std::uint64_t seed = 1;
  bool empirical_mse = false;

  int quadrature_nodes = 200;  // nodes of the base (feature-free) rule
  NumericsOptions numerics;    // quadrature.base_step follows quadrature_nodes
  OptimizerOptions optimizer;
  GampOptions gamp;

  double rho() const;
  SystemConfig system() const;
  TrialConfig trial() const;
  /// Recomputes numerics.quadrature.base_step from quadrature_nodes.
  void sync_quadrature();
};

/// Parses a JSON document; missing keys keep their defaults. Throws
/// ConfigError naming the offending key (as a JSON pointer) for unknown keys,
/// wrong types and out-of-range values.
RunConfig parse_run_config(const std::string& json_text);

/// Full document with every key, including defaults (what `--explain` prints).
std::string explain_run_config(const RunConfig& cfg);

/// Range checks shared by the parser and the command-line overrides.
void validate_run_config(const RunConfig& cfg);

}  // namespace qlst
