#include "cacq/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cacq {

namespace {

const char* const kRequiredKeys[] = {
    "q01", "q10", "lambda0", "lambda1", "rho", "mean_holding", "cac_threshold",
    "L", "A", "S", "mean_snr", "amc_thresholds", "amc_packets"};

const char* const kOptionalKeys[] = {
    "frame", "no_cac_truncation", "mode", "fading", "nakagami_m", "metric_mode",
    "solver", "solver_tol", "max_power_iters", "state_budget"};

bool known_key(const std::string& key) {
  for (const char* k : kRequiredKeys)
    if (key == k) return true;
  for (const char* k : kOptionalKeys)
    if (key == k) return true;
  return false;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double* out) {
  const char* begin = text.c_str();
  char* end = nullptr;
  *out = std::strtod(begin, &end);
  return end != begin && *end == '\0' && std::isfinite(*out);
}

bool parse_long(const std::string& text, long* out) {
  const char* begin = text.c_str();
  char* end = nullptr;
  *out = std::strtol(begin, &end, 10);
  return end != begin && *end == '\0';
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Raw key -> (value, line) with duplicate and syntax diagnostics.
struct RawConfig {
  std::map<std::string, std::pair<std::string, int>> entries;
  std::vector<ConfigError> errors;
};

RawConfig scan(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      raw.errors.push_back({lineno, "", "expected `key = value`"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      raw.errors.push_back({lineno, key, "expected `key = value`"});
      continue;
    }
    if (!known_key(key)) {
      raw.errors.push_back({lineno, key, "unknown key"});
      continue;
    }
    if (raw.entries.count(key)) {
      raw.errors.push_back({lineno, key, "duplicate key (first set on line " +
                                             std::to_string(raw.entries[key].second) + ")"});
      continue;
    }
    raw.entries[key] = {value, lineno};
  }
  return raw;
}

std::vector<double> parse_double_list(const std::string& text, bool* ok) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  *ok = true;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!parse_double(trim(item), &v)) {
      *ok = false;
      return out;
    }
    out.push_back(v);
  }
  if (out.empty()) *ok = false;
  return out;
}

}  // namespace

// Shared between parse_config (collect all) and SystemConfig::validate
// (throw first). Every message names its config key.
static std::vector<ConfigError> check_invariants(const SystemConfig& c) {
  std::vector<ConfigError> errs;
  auto bad = [&](const char* key, const std::string& msg) { errs.push_back({0, key, msg}); };

  if (c.mmpp.q01 < 0.0) bad("q01", "must be >= 0");
  if (c.mmpp.q10 < 0.0) bad("q10", "must be >= 0");
  if (c.mmpp.q01 + c.mmpp.q10 <= 0.0) bad("q01", "q01 + q10 must be > 0");
  if (c.mmpp.lambda0 < 0.0) bad("lambda0", "must be >= 0");
  if (c.mmpp.lambda1 < 0.0) bad("lambda1", "must be >= 0");
  if (c.rho < 0.0) bad("rho", "must be >= 0");
  if (!(c.mean_holding > 0.0)) bad("mean_holding", "must be > 0");
  if (!(c.frame > 0.0)) bad("frame", "must be > 0");
  if (c.cac_threshold < 1) bad("cac_threshold", "must be >= 1");
  if (c.no_cac_truncation < 1) bad("no_cac_truncation", "must be >= 1");
  if (c.queue_size < 0) bad("L", "must be >= 0");
  if (c.arrival_cap < 1) bad("A", "must be >= 1");
  if (c.channel.subchannels < 0) bad("S", "must be >= 0");
  if (!std::isfinite(c.channel.mean_snr_db)) bad("mean_snr", "must be finite");
  if (c.channel.fading == Fading::nakagami && !(c.channel.nakagami_m >= 0.5))
    bad("nakagami_m", "must be >= 0.5");
  if (c.amc.thresholds_db.empty()) {
    bad("amc_thresholds", "must list at least one rate");
  } else {
    for (std::size_t r = 1; r < c.amc.thresholds_db.size(); ++r)
      if (!(c.amc.thresholds_db[r] > c.amc.thresholds_db[r - 1])) {
        bad("amc_thresholds", "must be strictly increasing");
        break;
      }
  }
  if (c.amc.packets_per_rate.size() != c.amc.thresholds_db.size())
    bad("amc_packets", "must match amc_thresholds in length");
  for (std::size_t r = 0; r < c.amc.packets_per_rate.size(); ++r) {
    if (c.amc.packets_per_rate[r] < 0 ||
        (r > 0 && c.amc.packets_per_rate[r] < c.amc.packets_per_rate[r - 1])) {
      bad("amc_packets", "must be nonnegative and nondecreasing");
      break;
    }
  }
  if (!(c.solver_tol > 0.0)) bad("solver_tol", "must be > 0");
  if (c.max_power_iters < 1) bad("max_power_iters", "must be >= 1");
  if (c.state_budget < 1) bad("state_budget", "must be >= 1");
  return errs;
}

void SystemConfig::validate() const {
  const auto errs = check_invariants(*this);
  if (!errs.empty())
    throw std::invalid_argument("config: " + errs.front().key + " " + errs.front().message);
}

ParseResult parse_config(const std::string& text) {
  RawConfig raw = scan(text);
  ParseResult result;
  result.errors = std::move(raw.errors);

  for (const char* key : kRequiredKeys)
    if (!raw.entries.count(key)) result.errors.push_back({0, key, "missing required key"});

  SystemConfig cfg;
  auto take = [&](const char* key) -> const std::pair<std::string, int>* {
    auto it = raw.entries.find(key);
    return it == raw.entries.end() ? nullptr : &it->second;
  };
  auto get_double = [&](const char* key, double* dst) {
    if (const auto* e = take(key)) {
      if (!parse_double(e->first, dst))
        result.errors.push_back({e->second, key, "not a finite number"});
    }
  };
  auto get_int = [&](const char* key, int* dst) {
    if (const auto* e = take(key)) {
      long v;
      if (!parse_long(e->first, &v))
        result.errors.push_back({e->second, key, "not an integer"});
      else
        *dst = static_cast<int>(v);
    }
  };
  auto get_long = [&](const char* key, long* dst) {
    if (const auto* e = take(key)) {
      if (!parse_long(e->first, dst))
        result.errors.push_back({e->second, key, "not an integer"});
    }
  };
  auto get_enum = [&]<typename E>(const char* key, E* dst,
                                  std::initializer_list<std::pair<const char*, E>> values) {
    if (const auto* e = take(key)) {
      for (const auto& [name, v] : values) {
        if (e->first == name) {
          *dst = v;
          return;
        }
      }
      std::string allowed;
      for (const auto& [name, v] : values) allowed += std::string(allowed.empty() ? "" : " | ") + name;
      result.errors.push_back({e->second, key, "must be one of: " + allowed});
    }
  };

  get_double("q01", &cfg.mmpp.q01);
  get_double("q10", &cfg.mmpp.q10);
  get_double("lambda0", &cfg.mmpp.lambda0);
  get_double("lambda1", &cfg.mmpp.lambda1);
  get_double("rho", &cfg.rho);
  get_double("mean_holding", &cfg.mean_holding);
  get_double("frame", &cfg.frame);
  get_int("cac_threshold", &cfg.cac_threshold);
  get_int("no_cac_truncation", &cfg.no_cac_truncation);
  get_enum("mode", &cfg.mode, {{"cac", Mode::cac}, {"no_cac", Mode::no_cac}});
  get_int("L", &cfg.queue_size);
  get_int("A", &cfg.arrival_cap);
  get_int("S", &cfg.channel.subchannels);
  get_double("mean_snr", &cfg.channel.mean_snr_db);
  get_enum("fading", &cfg.channel.fading,
           {{"nakagami", Fading::nakagami}, {"deterministic", Fading::deterministic}});
  get_double("nakagami_m", &cfg.channel.nakagami_m);
  get_enum("metric_mode", &cfg.metric_mode,
           {{"consistent", MetricMode::consistent}, {"paper_literal", MetricMode::paper_literal}});
  get_enum("solver", &cfg.solver,
           {{"auto", SolverChoice::automatic},
            {"direct", SolverChoice::direct},
            {"power", SolverChoice::power}});
  get_double("solver_tol", &cfg.solver_tol);
  get_long("max_power_iters", &cfg.max_power_iters);
  get_long("state_budget", &cfg.state_budget);

  if (const auto* e = take("amc_thresholds")) {
    bool ok;
    cfg.amc.thresholds_db = parse_double_list(e->first, &ok);
    if (!ok) result.errors.push_back({e->second, "amc_thresholds", "not a comma-separated number list"});
  }
  if (const auto* e = take("amc_packets")) {
    bool ok;
    const auto values = parse_double_list(e->first, &ok);
    for (double v : values) {
      if (v != std::floor(v)) ok = false;
      cfg.amc.packets_per_rate.push_back(static_cast<int>(v));
    }
    if (!ok) result.errors.push_back({e->second, "amc_packets", "not a comma-separated integer list"});
  }

  if (result.errors.empty()) {
    for (const auto& err : check_invariants(cfg)) result.errors.push_back(err);
  }
  if (result.errors.empty()) result.config = cfg;
  return result;
}

ParseResult load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.errors.push_back({0, "", "cannot open config file: " + path});
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_string(Mode m) { return m == Mode::cac ? "cac" : "no_cac"; }
std::string to_string(MetricMode m) {
  return m == MetricMode::consistent ? "consistent" : "paper_literal";
}
std::string to_string(SolverChoice s) {
  switch (s) {
    case SolverChoice::direct: return "direct";
    case SolverChoice::power: return "power";
    default: return "auto";
  }
}
std::string to_string(Fading f) {
  return f == Fading::nakagami ? "nakagami" : "deterministic";
}

std::string serialize_config(const SystemConfig& c) {
  std::ostringstream out;
  out << "q01 = " << fmt(c.mmpp.q01) << "\n";
  out << "q10 = " << fmt(c.mmpp.q10) << "\n";
  out << "lambda0 = " << fmt(c.mmpp.lambda0) << "\n";
  out << "lambda1 = " << fmt(c.mmpp.lambda1) << "\n";
  out << "A = " << c.arrival_cap << "\n";
  out << "rho = " << fmt(c.rho) << "\n";
  out << "mean_holding = " << fmt(c.mean_holding) << "\n";
  out << "mode = " << to_string(c.mode) << "\n";
  out << "cac_threshold = " << c.cac_threshold << "\n";
  out << "no_cac_truncation = " << c.no_cac_truncation << "\n";
  out << "L = " << c.queue_size << "\n";
  out << "frame = " << fmt(c.frame) << "\n";
  out << "S = " << c.channel.subchannels << "\n";
  out << "mean_snr = " << fmt(c.channel.mean_snr_db) << "\n";
  out << "fading = " << to_string(c.channel.fading) << "\n";
  out << "nakagami_m = " << fmt(c.channel.nakagami_m) << "\n";
  out << "amc_thresholds = ";
  for (std::size_t r = 0; r < c.amc.thresholds_db.size(); ++r)
    out << (r ? ", " : "") << fmt(c.amc.thresholds_db[r]);
  out << "\n";
  out << "amc_packets = ";
  for (std::size_t r = 0; r < c.amc.packets_per_rate.size(); ++r)
    out << (r ? ", " : "") << c.amc.packets_per_rate[r];
  out << "\n";
  out << "metric_mode = " << to_string(c.metric_mode) << "\n";
  out << "solver = " << to_string(c.solver) << "\n";
  out << "solver_tol = " << fmt(c.solver_tol) << "\n";
  out << "max_power_iters = " << c.max_power_iters << "\n";
  out << "state_budget = " << c.state_budget << "\n";
  return out.str();
}

std::string default_config_text() {
  return R"(# cacq scenario configuration
# Units are fixed per key: connection rates are per minute, packet rates and
# switching rates per frame, SNR in dB, frame duration in minutes.
# Lists are comma separated. `#` starts a comment.

# --- per-connection packet arrivals (two-state MMPP) ---
q01 = 0.2               # phase 0 -> 1 switching rate (per frame)
q10 = 0.2               # phase 1 -> 0 switching rate (per frame)
lambda0 = 1             # packets per frame in phase 0
lambda1 = 2             # packets per frame in phase 1
A = 30                  # per-connection arrivals per frame are capped here

# --- connection dynamics ---
rho = 0.4               # connection arrival rate (per minute)
mean_holding = 10       # mean connection lifetime (minutes)
mode = cac              # cac | no_cac
cac_threshold = 10      # C: admission limit (connections), cac mode
no_cac_truncation = 25  # C_tr: connection-state cap (connections), no_cac mode

# --- queue ---
# Within a frame the station transmits from the standing backlog first, then
# appends that frame's arrivals, then drops whatever exceeds L.
L = 150                 # queue capacity (packets)
frame = 1.6666666666666667e-05   # frame duration (minutes); 1 ms

# --- channel: S subchannels, i.i.d. fading, AMC rate table ---
# The rate table is a configurable default: entry r carries
# amc_packets[r] packets per subchannel per frame once the instantaneous
# SNR reaches amc_thresholds[r] dB.
S = 5                   # subchannels
mean_snr = 5            # mean SNR per subchannel (dB)
fading = nakagami       # nakagami | deterministic
nakagami_m = 1          # Nakagami shape (1 = Rayleigh)
amc_thresholds = 1.5, 4.5, 7.5, 10.5, 14, 18.5, 21
amc_packets = 1, 2, 3, 4, 6, 8, 9

# --- reporting and solver ---
metric_mode = consistent     # consistent | paper_literal
solver = auto                # auto | direct | power
solver_tol = 1e-10
max_power_iters = 2000000
state_budget = 200000
)";
}

SystemConfig default_config() {
  auto result = parse_config(default_config_text());
  if (!result.ok()) throw std::logic_error("built-in default config failed to parse");
  return *result.config;
}

const std::vector<std::string>& sweep_keys() {
  static const std::vector<std::string> keys = {
      "q01", "q10", "lambda0", "lambda1", "rho", "mean_holding", "frame",
      "mean_snr", "nakagami_m", "L", "A", "S", "cac_threshold", "no_cac_truncation"};
  return keys;
}

bool apply_sweep_value(SystemConfig& cfg, const std::string& key, double value,
                       std::string* err) {
  auto set_int = [&](int* dst) {
    if (std::abs(value - std::round(value)) > 1e-9) {
      if (err) *err = key + " requires a whole number, got " + fmt(value);
      return false;
    }
    *dst = static_cast<int>(std::llround(value));
    return true;
  };
  if (key == "q01") cfg.mmpp.q01 = value;
  else if (key == "q10") cfg.mmpp.q10 = value;
  else if (key == "lambda0") cfg.mmpp.lambda0 = value;
  else if (key == "lambda1") cfg.mmpp.lambda1 = value;
  else if (key == "rho") cfg.rho = value;
  else if (key == "mean_holding") cfg.mean_holding = value;
  else if (key == "frame") cfg.frame = value;
  else if (key == "mean_snr") cfg.channel.mean_snr_db = value;
  else if (key == "nakagami_m") cfg.channel.nakagami_m = value;
  else if (key == "L") return set_int(&cfg.queue_size);
  else if (key == "A") return set_int(&cfg.arrival_cap);
  else if (key == "S") return set_int(&cfg.channel.subchannels);
  else if (key == "cac_threshold") return set_int(&cfg.cac_threshold);
  else if (key == "no_cac_truncation") return set_int(&cfg.no_cac_truncation);
  else {
    if (err) *err = "unknown or non-sweepable key: " + key;
    return false;
  }
  return true;
}

}  // namespace cacq
