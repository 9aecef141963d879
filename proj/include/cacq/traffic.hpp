#pragma once

#include "cacq/pmf.hpp"

namespace cacq {

// Connection-level dynamics. Connection interarrival and holding times are
// exponential; rho and 1/mean_holding are per-minute rates while `frame`
// converts them to the per-frame grid.
struct ConnectionParams {
  double rho = 0.0;                 // connection arrival rate, per minute
  double mean_holding = 1.0;        // mean connection lifetime, minutes
  double frame = 1.0 / 60000.0;     // frame duration, minutes (1 ms default)
  int threshold = 1;                // max ongoing connections (C, or C_tr when truncating)

  double departure_rate() const { return 1.0 / mean_holding; }

  void validate() const;
};

struct ConnectionStep {
  double up = 0.0;
  double down = 0.0;
  double stay = 1.0;
};

// Per-frame, per-connection packet arrivals: Poisson(lambda) with the whole
// tail mass Pr[X >= cap] lumped at cap, so the support stays finite.
Pmf per_connection_arrival_pmf(double lambda, int cap);

// Arrivals from k independent connections with identical per-connection law.
Pmf aggregate_arrival_pmf(const Pmf& per_conn, int k);

// Birth-death step probabilities for the connection count over one frame.
// At most one connection event is resolved per frame; an arrival landing on
// k == threshold is refused.
ConnectionStep connection_transition_probs(int k, const ConnectionParams& p);

}  // namespace cacq
