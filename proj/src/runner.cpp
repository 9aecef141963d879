#include "cacq/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "cacq/chain.hpp"
#include "cacq/metrics.hpp"
#include "cacq/mmpp.hpp"

namespace cacq {

namespace {

std::string cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RunRow analytic_row(const SystemConfig& cfg, const std::string& scenario,
                    const std::string& dump_path, std::vector<std::string>* warnings) {
  const double t0 = now_ms();
  const TransitionMatrix tm = build_transition_matrix(cfg);
  const StationaryDistribution pi = solve_stationary_auto(tm, cfg);
  const MetricsReport m = compute_metrics(pi, tm, mean_rate(cfg.mmpp), cfg.metric_mode);

  RunRow row;
  row.scenario = scenario;
  row.source = "analytic";
  row.mode = cfg.mode;
  row.metric_mode = cfg.metric_mode;
  row.metric[0] = m.p_block;
  row.metric[1] = m.n_connections;
  row.metric[2] = m.n_queue;
  row.metric[3] = m.n_drop;
  row.metric[4] = m.lambda_bar;
  row.metric[5] = m.p_drop;
  row.metric[6] = m.throughput;
  row.metric[7] = m.delay;
  row.delay_defined = m.delay_defined;
  row.residual = pi.residual;
  row.has_residual = true;
  if (!m.delay_defined)
    warnings->push_back(scenario + ": throughput is zero, delay undefined");

  if (cfg.mode == Mode::no_cac) {
    row.truncation = truncation_check(pi, cfg.mode);
    row.has_truncation = true;
    if (row.truncation >= 2e-4)
      warnings->push_back(scenario + ": truncation boundary mass " + cell(row.truncation) +
                          " >= 2e-4; raise no_cac_truncation");
  }
  if (!dump_path.empty()) {
    std::ofstream out(dump_path);
    if (!out) throw std::runtime_error("cannot write chain dump: " + dump_path);
    dump_chain(out, tm, &pi);
  }
  row.wall_ms = now_ms() - t0;
  return row;
}

RunRow sim_row(const SystemConfig& cfg, const SimConfig& sim, const std::string& scenario,
               std::vector<std::string>* warnings) {
  const double t0 = now_ms();
  const SimReport rep = simulate(cfg, sim);
  if (rep.offered < 2 * sim.batches)
    warnings->push_back(scenario + ": only " + std::to_string(rep.offered) +
                        " connection arrivals in " + std::to_string(rep.frames_run) +
                        " frames; connection-level estimates are unreliable, lengthen "
                        "the run or speed up the dynamics");

  RunRow row;
  row.scenario = scenario;
  row.source = "sim";
  row.mode = cfg.mode;
  row.metric_mode = cfg.metric_mode;
  const Estimate* est[8] = {&rep.p_block, &rep.n_connections, &rep.n_queue, &rep.n_drop,
                            &rep.lambda_bar, &rep.p_drop, &rep.throughput, &rep.delay};
  for (int i = 0; i < 8; ++i) {
    row.metric[i] = est[i]->value;
    row.ci99[i] = est[i]->ci99;
  }
  row.has_ci = true;
  row.wall_ms = now_ms() - t0;
  return row;
}

}  // namespace

std::string csv_header() {
  std::string h = "scenario,sweep_key,sweep_value,source,mode,metric_mode";
  for (const char* m : kMetricNames) h += std::string(",") + m;
  for (const char* m : kMetricNames) h += std::string(",ci_") + m;
  h += ",truncation_check,residual,wall_ms";
  return h;
}

std::string csv_row(const RunRow& row) {
  std::ostringstream out;
  out << row.scenario << ',' << row.sweep_key << ','
      << (row.has_sweep ? cell(row.sweep_value) : "") << ',' << row.source << ','
      << to_string(row.mode) << ',' << to_string(row.metric_mode);
  for (int i = 0; i < 8; ++i) out << ',' << cell(row.metric[i]);
  for (int i = 0; i < 8; ++i) out << ',' << (row.has_ci ? cell(row.ci99[i]) : "");
  out << ',' << (row.has_truncation ? cell(row.truncation) : "");
  out << ',' << (row.has_residual ? cell(row.residual) : "");
  out << ',' << cell(row.wall_ms);
  return out.str();
}

RunOutcome run(const SystemConfig& cfg, Command cmd, const SimConfig& sim,
               const std::string& scenario, const std::string& dump_path) {
  cfg.validate();
  RunOutcome outcome;
  if (cmd != Command::simulate)
    outcome.rows.push_back(analytic_row(cfg, scenario, dump_path, &outcome.warnings));
  if (cmd != Command::analyze)
    outcome.rows.push_back(sim_row(cfg, sim, scenario, &outcome.warnings));
  return outcome;
}

int SweepSpec::points() const {
  if (step == 0.0) return 0;
  const double span = (end - start) / step;
  if (span < -1e-9) return 0;
  return static_cast<int>(std::floor(span + 1e-9)) + 1;
}

SweepSpec SweepSpec::parse(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("sweep: expected key=start:step:end, got `" + text + "`");
  SweepSpec spec;
  spec.key = text.substr(0, eq);

  bool known = false;
  for (const auto& k : sweep_keys()) known = known || k == spec.key;
  if (!known) throw std::invalid_argument("sweep: unknown or non-sweepable key: " + spec.key);

  const std::string range = text.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : range.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("sweep: expected start:step:end, got `" + range + "`");

  auto number = [&](const std::string& s, const char* what) {
    char* endp = nullptr;
    const double v = std::strtod(s.c_str(), &endp);
    if (endp == s.c_str() || *endp != '\0' || !std::isfinite(v))
      throw std::invalid_argument(std::string("sweep: ") + what + " is not a number: `" + s + "`");
    return v;
  };
  spec.start = number(range.substr(0, c1), "start");
  spec.step = number(range.substr(c1 + 1, c2 - c1 - 1), "step");
  spec.end = number(range.substr(c2 + 1), "end");

  if (spec.step == 0.0) throw std::invalid_argument("sweep: step must be nonzero");
  const int n = spec.points();
  if (n < 1) throw std::invalid_argument("sweep: empty range (step points away from end)");
  if (n > 100000) throw std::invalid_argument("sweep: too many points: " + std::to_string(n));
  return spec;
}

RunOutcome sweep(const SystemConfig& base, const SweepSpec& spec, Command cmd,
                 const SimConfig& sim, bool both_modes) {
  base.validate();
  if (spec.points() < 1) throw std::invalid_argument("sweep: empty range");

  std::vector<Mode> modes;
  if (both_modes) modes = {Mode::cac, Mode::no_cac};
  else modes = {base.mode};

  struct Job {
    SystemConfig cfg;
    SimConfig sim;
    std::string scenario;
    double value;
  };
  std::vector<Job> jobs;
  for (int p = 0; p < spec.points(); ++p) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      Job job;
      job.cfg = base;
      job.cfg.mode = modes[m];
      std::string err;
      if (!apply_sweep_value(job.cfg, spec.key, spec.value(p), &err))
        throw std::invalid_argument("sweep: " + err);
      job.cfg.validate();
      job.sim = sim;
      job.sim.seed = mix_seed(sim.seed, p * 2 + m);
      char name[64];
      std::snprintf(name, sizeof name, "p%03d_%s", p, to_string(modes[m]).c_str());
      job.scenario = name;
      job.value = spec.value(p);
      jobs.push_back(std::move(job));
    }
  }

  // Points run concurrently; rows are assembled in job order afterwards so
  // output is deterministic regardless of scheduling.
  std::vector<RunOutcome> results(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t idx; (idx = next.fetch_add(1)) < jobs.size();) {
        try {
          results[idx] = run(jobs[idx].cfg, cmd, jobs[idx].sim, jobs[idx].scenario);
        } catch (...) {
          failures[idx] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t idx = 0; idx < jobs.size(); ++idx)
    if (failures[idx]) std::rethrow_exception(failures[idx]);

  RunOutcome outcome;
  for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
    for (RunRow row : results[idx].rows) {
      row.sweep_key = spec.key;
      row.sweep_value = jobs[idx].value;
      row.has_sweep = true;
      outcome.rows.push_back(std::move(row));
    }
    for (auto& w : results[idx].warnings) outcome.warnings.push_back(std::move(w));
  }
  return outcome;
}

std::string plot_script(const std::string& csv_path, const SweepSpec& spec,
                        const std::string& output_prefix) {
  std::ostringstream out;
  out << "# gnuplot script generated by cacq sweep\n";
  out << "# x axis: " << spec.key << " from " << spec.start << " to " << spec.end << "\n";
  out << "set datafile separator ','\n";
  out << "set datafile missing 'nan'\n";
  out << "set term pngcairo size 900,600\n";
  out << "set key outside\n";
  out << "set xlabel '" << spec.key << "'\n";
  // column layout: sweep_value=3, source=4, mode=5, metrics start at 7
  for (int m = 0; m < 8; ++m) {
    const std::string metric = kMetricNames[m];
    const int column = 7 + m;
    out << "\nset output '" << output_prefix << "_" << metric << ".png'\n";
    out << "set ylabel '" << metric << "'\n";
    out << "plot \\\n";
    const char* series[4][2] = {{"analytic", "cac"},
                                {"analytic", "no_cac"},
                                {"sim", "cac"},
                                {"sim", "no_cac"}};
    for (int s = 0; s < 4; ++s) {
      out << "  '" << csv_path << "' using (stringcolumn(4) eq '" << series[s][0]
          << "' && stringcolumn(5) eq '" << series[s][1] << "' ? $3 : NaN):" << column
          << " with linespoints title '" << series[s][1] << " " << series[s][0] << "'"
          << (s + 1 < 4 ? ", \\" : "") << "\n";
    }
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace cacq
