#include "cacq/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cacq {

double blocking_probability(const StationaryDistribution& pi) {
  double p = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j <= pi.indexer.L; ++j) p += pi(i, j, pi.indexer.K);
  return p;
}

double avg_connections(const StationaryDistribution& pi) {
  double n = 0.0;
  for (int s = 0; s < static_cast<int>(pi.pi.size()); ++s)
    n += pi.indexer.state(s).conns * pi.pi[s];
  return n;
}

double avg_queue_length(const StationaryDistribution& pi) {
  double n = 0.0;
  for (int s = 0; s < static_cast<int>(pi.pi.size()); ++s)
    n += pi.indexer.state(s).queue * pi.pi[s];
  return n;
}

DropMetrics drop_metrics(const StationaryDistribution& pi, const TransitionMatrix& tm,
                         double mmpp_rate, MetricMode mode) {
  if (pi.pi.size() != tm.expected_drops.size())
    throw std::invalid_argument("metrics: distribution does not match the chain");

  DropMetrics d;
  for (std::size_t s = 0; s < pi.pi.size(); ++s) d.n_drop += pi.pi[s] * tm.expected_drops[s];

  if (mode == MetricMode::paper_literal) {
    d.lambda_bar = mmpp_rate * avg_connections(pi);
  } else {
    for (std::size_t s = 0; s < pi.pi.size(); ++s)
      d.lambda_bar += pi.pi[s] * tm.mean_arrivals[s];
  }
  d.p_drop = d.lambda_bar > 0.0 ? d.n_drop / d.lambda_bar : 0.0;
  return d;
}

ThroughputDelay throughput_and_delay(const DropMetrics& d, double n_queue,
                                     double mmpp_rate, MetricMode mode) {
  ThroughputDelay td;
  const double base = mode == MetricMode::paper_literal ? mmpp_rate : d.lambda_bar;
  td.throughput = base * (1.0 - d.p_drop);
  td.delay_defined = td.throughput > 0.0;
  td.delay = td.delay_defined ? n_queue / td.throughput
                              : std::numeric_limits<double>::quiet_NaN();
  return td;
}

MetricsReport compute_metrics(const StationaryDistribution& pi, const TransitionMatrix& tm,
                              double mmpp_rate, MetricMode mode) {
  MetricsReport r;
  r.mode = mode;
  r.p_block = blocking_probability(pi);
  r.n_connections = avg_connections(pi);
  r.n_queue = avg_queue_length(pi);

  const DropMetrics d = drop_metrics(pi, tm, mmpp_rate, mode);
  r.n_drop = d.n_drop;
  r.lambda_bar = d.lambda_bar;
  r.p_drop = d.p_drop;

  const ThroughputDelay td = throughput_and_delay(d, r.n_queue, mmpp_rate, mode);
  r.throughput = td.throughput;
  r.delay = td.delay;
  r.delay_defined = td.delay_defined;
  r.flow_residual = std::abs(r.lambda_bar - r.throughput - r.n_drop);

  // Range sanity on every run; violations mean the solve went wrong.
  const double slack = 1e-6;
  if (r.p_block < -slack || r.p_block > 1.0 + slack || r.p_drop < -slack ||
      r.p_drop > 1.0 + slack || r.n_queue > pi.indexer.L + slack ||
      r.n_connections > pi.indexer.K + slack)
    throw NumericError("metrics outside feasible ranges; stationary solve is suspect");
  return r;
}

double erlang_b(double load, int servers) {
  if (load < 0.0 || servers < 0) throw std::invalid_argument("erlang_b: negative input");
  double b = 1.0;
  for (int n = 1; n <= servers; ++n) b = load * b / (n + load * b);
  return b;
}

}  // namespace cacq
