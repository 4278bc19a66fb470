#pragma once

#include "qlst/replica.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qlst {

using Cell = std::variant<std::string, double, std::int64_t>;

struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct AssertionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  /// Tolerances come from figure captions rather than tabulated values.
  bool caption_derived = false;
};

struct PresetOptions {
  int threads = 1;
  int n_trials = 10000;    // Monte Carlo preset only
  std::uint64_t seed = 1;  // Monte Carlo preset only
  NumericsOptions numerics;
  /// Replace the SNR axis (dB, may contain inf) of presets that sweep SNR.
  std::vector<double> snr_db;
  /// Replace the alpha axis of presets that sweep alpha.
  std::vector<double> alpha;
  /// Replace the beta axis of presets that sweep beta.
  std::vector<double> beta;
};

struct PresetReport {
  std::string id;
  Dataset data;
  std::vector<AssertionResult> assertions;
  int points = 0;
  int failed_points = 0;

  bool passed() const;
};

struct PresetInfo {
  std::string id;
  std::string description;
};

const std::vector<PresetInfo>& preset_catalog();
bool has_preset(std::string_view id);

/// Runs the sweep for `id`, evaluates its assertions and returns both.
/// Individual point failures are recorded in the row's status column; the
/// preset fails when more than 2% of points fail. Points whose target lies
/// beyond the model's reach are marked unreachable (value inf) and do not
/// count as failures. Throws std::invalid_argument
/// for an unknown id.
PresetReport run_preset(std::string_view id, const PresetOptions& options = {});

/// Shortest decimal string that reads back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// RFC 4180 style: header row, comma separated, quoted only when needed.
void write_csv(std::ostream& out, const Dataset& data);

/// One JSON object per row, then one per assertion.
void write_json_lines(std::ostream& out, const PresetReport& report);

}  // namespace qlst
