#include "cacq/traffic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cacq {

void ConnectionParams::validate() const {
  if (rho < 0.0) throw std::invalid_argument("connections: rho must be nonnegative");
  if (!(mean_holding > 0.0)) throw std::invalid_argument("connections: mean holding time must be positive");
  if (!(frame > 0.0)) throw std::invalid_argument("connections: frame duration must be positive");
  if (threshold < 1) throw std::invalid_argument("connections: threshold must be >= 1");
}

Pmf per_connection_arrival_pmf(double lambda, int cap) {
  if (lambda < 0.0) throw std::invalid_argument("arrivals: lambda must be nonnegative");
  if (cap < 1) throw std::invalid_argument("arrivals: cap must be >= 1");

  Pmf pmf(cap + 1, 0.0);
  double term = std::exp(-lambda);
  double below = 0.0;
  for (int n = 0; n < cap; ++n) {
    pmf[n] = term;
    below += term;
    term *= lambda / (n + 1);
  }
  pmf[cap] = std::max(0.0, 1.0 - below);  // tail mass Pr[X >= cap], lumped
  return pmf;
}

Pmf aggregate_arrival_pmf(const Pmf& per_conn, int k) {
  if (k < 0) throw std::invalid_argument("arrivals: connection count must be >= 0");
  check_pmf(per_conn);
  return convolve_power(per_conn, k);
}

ConnectionStep connection_transition_probs(int k, const ConnectionParams& p) {
  p.validate();
  if (k < 0 || k > p.threshold)
    throw std::invalid_argument("connections: k = " + std::to_string(k) + " outside [0, threshold]");

  const double arrival = -std::expm1(-p.rho * p.frame);
  const double departure = -std::expm1(-k * p.departure_rate() * p.frame);

  ConnectionStep step;
  step.up = k < p.threshold ? arrival * (1.0 - departure) : 0.0;
  step.down = departure * (1.0 - arrival);  // zero at k = 0
  step.stay = 1.0 - step.up - step.down;
  return step;
}

}  // namespace cacq
