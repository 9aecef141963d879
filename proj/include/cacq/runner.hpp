#pragma once

#include <string>
#include <vector>

#include "cacq/config.hpp"
#include "cacq/sim.hpp"

namespace cacq {

enum class Command { analyze, simulate, both };

// One CSV row: an analytic or simulated evaluation of one scenario point.
struct RunRow {
  std::string scenario;
  std::string sweep_key;      // empty outside sweeps
  double sweep_value = 0.0;
  bool has_sweep = false;
  std::string source;         // "analytic" | "sim"
  Mode mode = Mode::cac;
  MetricMode metric_mode = MetricMode::consistent;

  double metric[8] = {0, 0, 0, 0, 0, 0, 0, 0};  // kMetricNames order
  bool delay_defined = true;
  double ci99[8] = {0, 0, 0, 0, 0, 0, 0, 0};    // sim rows only
  bool has_ci = false;
  double truncation = 0.0;    // no_cac analytic rows only
  bool has_truncation = false;
  double residual = 0.0;      // analytic rows only
  bool has_residual = false;
  double wall_ms = 0.0;
};

inline constexpr const char* kMetricNames[8] = {
    "p_block", "n_connections", "n_queue", "n_drop",
    "lambda_bar", "p_drop", "throughput", "delay"};

std::string csv_header();
std::string csv_row(const RunRow& row);

struct RunOutcome {
  std::vector<RunRow> rows;
  std::vector<std::string> warnings;
};

// Analyze (build chain, solve, metrics) and/or simulate one scenario.
// Writes the chain dump when dump_path is nonempty (analytic paths only).
RunOutcome run(const SystemConfig& cfg, Command cmd, const SimConfig& sim,
               const std::string& scenario = "scenario",
               const std::string& dump_path = "");

struct SweepSpec {
  std::string key;
  double start = 0.0;
  double step = 0.0;
  double end = 0.0;

  int points() const;
  double value(int i) const { return start + step * i; }

  // Parses "key=start:step:end"; throws std::invalid_argument on malformed
  // specs, zero step, unknown keys, or empty/oversized ranges.
  static SweepSpec parse(const std::string& text);
};

// Evaluates every sweep point, by default under both the cac and no_cac
// series (the latter capped at no_cac_truncation). Points run concurrently;
// rows come back in deterministic point-major order. Sim seeds are derived
// per (point, mode) so results do not depend on scheduling.
RunOutcome sweep(const SystemConfig& base, const SweepSpec& spec, Command cmd,
                 const SimConfig& sim, bool both_modes = true);

// gnuplot script rendering one chart per metric from a sweep CSV.
std::string plot_script(const std::string& csv_path, const SweepSpec& spec,
                        const std::string& output_prefix);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cacq
