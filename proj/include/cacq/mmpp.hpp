#pragma once

#include <array>

namespace cacq {

// Two-state Markov-modulated Poisson process. Switching rates and packet
// rates are both expressed per frame, the model's time unit.
struct MmppParams {
  double q01 = 0.0;      // phase 0 -> 1 switching rate
  double q10 = 0.0;      // phase 1 -> 0 switching rate
  double lambda0 = 0.0;  // packet rate while in phase 0
  double lambda1 = 0.0;  // packet rate while in phase 1

  double rate(int phase) const { return phase == 0 ? lambda0 : lambda1; }

  // Throws std::invalid_argument on negative rates or q01 + q10 == 0.
  void validate() const;

  bool operator==(const MmppParams&) const = default;
};

// Row-stochastic 2x2 matrix, [from][to].
using PhaseMatrix = std::array<std::array<double, 2>, 2>;

// Stationary law (pi0, pi1) of the modulating chain.
std::array<double, 2> steady_state(const MmppParams& p);

// Mean packet rate under the stationary phase law.
double mean_rate(const MmppParams& p);

// Exact transition matrix of the modulating chain over t frames:
// P(t) = Pi + exp(-(q01+q10) t) (I - Pi), where both rows of Pi equal
// the stationary law.
PhaseMatrix phase_transition_matrix(const MmppParams& p, double t);

}  // namespace cacq
