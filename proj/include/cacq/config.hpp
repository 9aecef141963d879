#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cacq/channel.hpp"
#include "cacq/mmpp.hpp"
#include "cacq/traffic.hpp"

namespace cacq {

enum class Mode { cac, no_cac };

enum class MetricMode { consistent, paper_literal };

enum class SolverChoice { automatic, direct, power };

// Full scenario description. Units are fixed per field: connection rates are
// per minute, packet rates per frame, SNR in dB. The flat key=value config
// format maps one key to each field; see serialize_config().
struct SystemConfig {
  MmppParams mmpp;

  double rho = 0.0;               // connections per minute
  double mean_holding = 10.0;     // minutes
  double frame = 1.0 / 60000.0;   // minutes (1 ms)
  int cac_threshold = 1;          // C, admission limit in cac mode
  int no_cac_truncation = 25;     // C_tr, numerical cap in no_cac mode
  Mode mode = Mode::cac;

  int queue_size = 0;             // L, packets
  int arrival_cap = 1;            // A, per-connection packets per frame

  ChannelModel channel;
  AmcTable amc;

  MetricMode metric_mode = MetricMode::consistent;
  SolverChoice solver = SolverChoice::automatic;
  double solver_tol = 1e-10;
  long max_power_iters = 2000000;
  long state_budget = 200000;

  // Active connection cap: C in cac mode, C_tr otherwise.
  int threshold() const {
    return mode == Mode::cac ? cac_threshold : no_cac_truncation;
  }

  ConnectionParams connection_params() const {
    return ConnectionParams{rho, mean_holding, frame, threshold()};
  }

  // Throws std::invalid_argument naming the offending config key.
  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

struct ConfigError {
  int line = 0;  // 0 when no line applies (missing key, cross-field checks)
  std::string key;
  std::string message;
};

struct ParseResult {
  std::optional<SystemConfig> config;
  std::vector<ConfigError> errors;

  bool ok() const { return config.has_value() && errors.empty(); }
};

// Parses the flat `key = value` format ('#' starts a comment). All field
// errors are collected, each naming its key and line.
ParseResult parse_config(const std::string& text);

// Reads and parses a file; a missing file is reported as an error.
ParseResult load_config(const std::string& path);

// Emits every key with full precision; parse_config() on the result yields
// an identical SystemConfig.
std::string serialize_config(const SystemConfig& cfg);

// Shipped default scenario (annotated with units), and its parsed form.
std::string default_config_text();
SystemConfig default_config();

// Keys addressable by a sweep, i.e. scalar numeric fields.
const std::vector<std::string>& sweep_keys();

// Sets one scalar field by key. Integer-valued keys require whole numbers.
// Returns false and fills *err on unknown keys or bad values.
bool apply_sweep_value(SystemConfig& cfg, const std::string& key, double value,
                       std::string* err);

std::string to_string(Mode m);
std::string to_string(MetricMode m);
std::string to_string(SolverChoice s);
std::string to_string(Fading f);

}  // namespace cacq
