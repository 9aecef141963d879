#include "cacq/mmpp.hpp"

#include <cmath>
#include <stdexcept>

namespace cacq {

void MmppParams::validate() const {
  if (q01 < 0.0 || q10 < 0.0)
    throw std::invalid_argument("mmpp: switching rates must be nonnegative");
  if (q01 + q10 <= 0.0)
    throw std::invalid_argument("mmpp: q01 + q10 must be positive");
  if (lambda0 < 0.0 || lambda1 < 0.0)
    throw std::invalid_argument("mmpp: packet rates must be nonnegative");
}

std::array<double, 2> steady_state(const MmppParams& p) {
  p.validate();
  const double total = p.q01 + p.q10;
  return {p.q10 / total, p.q01 / total};
}

double mean_rate(const MmppParams& p) {
  const auto pi = steady_state(p);
  return pi[0] * p.lambda0 + pi[1] * p.lambda1;
}

PhaseMatrix phase_transition_matrix(const MmppParams& p, double t) {
  if (t < 0.0) throw std::invalid_argument("mmpp: negative duration");
  const auto pi = steady_state(p);
  const double decay = std::exp(-(p.q01 + p.q10) * t);
  PhaseMatrix m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      m[i][j] = pi[j] + decay * ((i == j ? 1.0 : 0.0) - pi[j]);
  return m;
}

}  // namespace cacq
