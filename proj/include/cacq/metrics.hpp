#pragma once

#include "cacq/chain.hpp"
#include "cacq/config.hpp"

namespace cacq {

// The eight steady-state performance figures. In `consistent` mode the
// aggregate arrival rate is computed exactly from the chain, so
// lambda_bar = throughput + n_drop holds; `paper_literal` instead uses the
// per-connection MMPP mean rate in the arrival-rate and throughput formulas.
struct MetricsReport {
  double p_block = 0.0;        // probability an arriving connection is refused
  double n_connections = 0.0;  // mean ongoing connections
  double n_queue = 0.0;        // mean queued packets
  double n_drop = 0.0;         // mean dropped packets per frame
  double lambda_bar = 0.0;     // mean packet arrivals per frame
  double p_drop = 0.0;         // probability an arriving packet is dropped
  double throughput = 0.0;     // packets transmitted per frame
  double delay = 0.0;          // mean queueing delay, frames (NaN if undefined)
  bool delay_defined = true;   // false when throughput is zero
  MetricMode mode = MetricMode::consistent;
  double flow_residual = 0.0;  // |lambda_bar - throughput - n_drop|
};

double blocking_probability(const StationaryDistribution& pi);
double avg_connections(const StationaryDistribution& pi);
double avg_queue_length(const StationaryDistribution& pi);

struct DropMetrics {
  double n_drop = 0.0;
  double lambda_bar = 0.0;
  double p_drop = 0.0;  // 0 when lambda_bar is 0
};

DropMetrics drop_metrics(const StationaryDistribution& pi, const TransitionMatrix& tm,
                         double mmpp_rate, MetricMode mode);

struct ThroughputDelay {
  double throughput = 0.0;
  double delay = 0.0;
  bool delay_defined = true;
};

ThroughputDelay throughput_and_delay(const DropMetrics& d, double n_queue,
                                     double mmpp_rate, MetricMode mode);

MetricsReport compute_metrics(const StationaryDistribution& pi, const TransitionMatrix& tm,
                              double mmpp_rate, MetricMode mode);

// Blocking probability of the M/M/c/c loss system, by the stable recursion
// B(0) = 1, B(n) = load B(n-1) / (n + load B(n-1)).
double erlang_b(double load, int servers);

}  // namespace cacq
