#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cacq/chain.hpp"
#include "cacq/config.hpp"
#include "cacq/runner.hpp"

namespace {

// Exit codes: 0 success, 1 input error, 2 numeric failure, 3 internal error.
constexpr int kOkExit = 0;
constexpr int kInputExit = 1;
constexpr int kNumericExit = 2;
constexpr int kInternalExit = 3;

struct CommonOpts {
  std::string config_path;
  std::string out = "-";
  std::string metric_mode;
  std::string dump_chain;
  cacq::SimConfig sim;
};

void add_common(CLI::App* cmd, CommonOpts* opts, bool wants_sim, bool wants_dump) {
  cmd->add_option("--config", opts->config_path, "scenario config file")->required();
  cmd->add_option("--out", opts->out, "CSV output path, or - for stdout");
  cmd->add_option("--metric-mode", opts->metric_mode, "override: consistent | paper_literal");
  if (wants_sim) {
    cmd->add_option("--seed", opts->sim.seed, "simulation seed");
    cmd->add_option("--frames", opts->sim.frames, "simulated frames");
    cmd->add_option("--warmup", opts->sim.warmup, "discarded frames");
    cmd->add_option("--batches", opts->sim.batches, "batch-means batches");
  }
  if (wants_dump)
    cmd->add_option("--dump-chain", opts->dump_chain, "write P and pi as sparse triplets");
}

int load(const CommonOpts& opts, cacq::SystemConfig* cfg) {
  auto parsed = cacq::load_config(opts.config_path);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) {
      std::cerr << opts.config_path << ':';
      if (e.line > 0) std::cerr << e.line << ':';
      if (!e.key.empty()) std::cerr << ' ' << e.key << ':';
      std::cerr << ' ' << e.message << '\n';
    }
    return kInputExit;
  }
  *cfg = *parsed.config;
  if (!opts.metric_mode.empty()) {
    if (opts.metric_mode == "consistent") cfg->metric_mode = cacq::MetricMode::consistent;
    else if (opts.metric_mode == "paper_literal") cfg->metric_mode = cacq::MetricMode::paper_literal;
    else {
      std::cerr << "unknown --metric-mode: " << opts.metric_mode << '\n';
      return kInputExit;
    }
  }
  return kOkExit;
}

int emit(const cacq::RunOutcome& outcome, const std::string& out_path) {
  std::string text = cacq::csv_header() + "\n";
  for (const auto& row : outcome.rows) text += cacq::csv_row(row) + "\n";
  if (out_path == "-") std::cout << text;
  else cacq::write_text_file(out_path, text);
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
  return kOkExit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cacq: analyzer and simulator for a threshold-CAC OFDMA subscriber-station queue"};
  app.require_subcommand(1);

  auto* init = app.add_subcommand("init", "write an annotated default scenario config");
  std::string init_out = "cacq_defaults.conf";
  init->add_option("--out", init_out, "where to write the config");

  CommonOpts opts;
  auto* analyze = app.add_subcommand("analyze", "build the chain, solve it, report metrics");
  add_common(analyze, &opts, false, true);
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo run with confidence intervals");
  add_common(simulate, &opts, true, false);
  auto* both = app.add_subcommand("both", "analytic and simulated rows side by side");
  add_common(both, &opts, true, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a range of one scalar parameter");
  add_common(sweep_cmd, &opts, true, false);
  std::string sweep_arg, sweep_modes = "both", sweep_command = "analyze";
  sweep_cmd->add_option("--sweep", sweep_arg, "key=start:step:end")->required();
  sweep_cmd->add_option("--modes", sweep_modes, "series to run: both | cac | no_cac");
  sweep_cmd->add_option("--command", sweep_command, "per point: analyze | simulate | both");

  CLI11_PARSE(app, argc, argv);

  try {
    if (init->parsed()) {
      cacq::write_text_file(init_out, cacq::default_config_text());
      std::cerr << "wrote " << init_out << '\n';
      return kOkExit;
    }

    cacq::SystemConfig cfg;
    if (int rc = load(opts, &cfg); rc != kOkExit) return rc;

    cacq::Command cmd = cacq::Command::both;
    if (analyze->parsed()) cmd = cacq::Command::analyze;
    if (simulate->parsed()) cmd = cacq::Command::simulate;

    if (sweep_cmd->parsed()) {
      cacq::SweepSpec spec;
      bool both_modes = true;
      try {
        spec = cacq::SweepSpec::parse(sweep_arg);
        if (sweep_modes == "cac") { cfg.mode = cacq::Mode::cac; both_modes = false; }
        else if (sweep_modes == "no_cac") { cfg.mode = cacq::Mode::no_cac; both_modes = false; }
        else if (sweep_modes != "both")
          throw std::invalid_argument("unknown --modes: " + sweep_modes);
        if (sweep_command == "analyze") cmd = cacq::Command::analyze;
        else if (sweep_command == "simulate") cmd = cacq::Command::simulate;
        else if (sweep_command == "both") cmd = cacq::Command::both;
        else throw std::invalid_argument("unknown --command: " + sweep_command);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kInputExit;
      }
      const auto outcome = cacq::sweep(cfg, spec, cmd, opts.sim, both_modes);
      int rc = emit(outcome, opts.out);
      if (rc == kOkExit && opts.out != "-") {
        const std::string stem =
            opts.out.size() > 4 && opts.out.substr(opts.out.size() - 4) == ".csv"
                ? opts.out.substr(0, opts.out.size() - 4)
                : opts.out;
        cacq::write_text_file(stem + ".gp", cacq::plot_script(opts.out, spec, stem));
        std::cerr << "wrote " << stem << ".gp\n";
      }
      return rc;
    }

    const auto outcome = cacq::run(cfg, cmd, opts.sim, "scenario", opts.dump_chain);
    return emit(outcome, opts.out);
  } catch (const cacq::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericExit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputExit;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalExit;
  }
}
