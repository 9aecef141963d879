#pragma once

#include <cstdint>

#include "cacq/config.hpp"

namespace cacq {

struct SimConfig {
  std::uint64_t seed = 1;
  std::int64_t frames = 1000000;  // rounded down so batches divide the measured window
  std::int64_t warmup = 100000;   // discarded frames
  int batches = 20;               // batch-means batches

  void validate() const;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;    // standard error from batch means
  double ci99 = 0.0;  // 99% half-width, 2.5758 * se
};

// Empirical counterparts of MetricsReport, with batch-means confidence
// intervals, plus raw counters. Counters span the whole run (warmup
// included) so packet conservation is exact:
//   arrived == served + dropped + final_backlog.
struct SimReport {
  Estimate p_block;
  Estimate n_connections;
  Estimate n_queue;
  Estimate n_drop;
  Estimate lambda_bar;
  Estimate p_drop;
  Estimate throughput;
  Estimate delay;

  std::int64_t frames_run = 0;      // warmup + measured window
  std::int64_t arrived = 0;         // packets
  std::int64_t served = 0;
  std::int64_t dropped = 0;
  std::int64_t final_backlog = 0;
  std::int64_t offered = 0;         // connection arrivals seen
  std::int64_t blocked = 0;         // of those, refused at the threshold
};

// Frame-synchronous Monte-Carlo run of the same dynamics the chain encodes.
// Deterministic given (cfg, sim): one independent RNG stream per stochastic
// component, all derived from sim.seed.
SimReport simulate(const SystemConfig& cfg, const SimConfig& sim);

}  // namespace cacq
