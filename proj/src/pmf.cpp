#include "cacq/pmf.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cacq {

double pmf_sum(const Pmf& p) {
  return std::accumulate(p.begin(), p.end(), 0.0);
}

double pmf_mean(const Pmf& p) {
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
  return m;
}

Pmf convolve(const Pmf& a, const Pmf& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("convolve: empty pmf");
  Pmf out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b[j];
  }
  return out;
}

Pmf convolve_power(const Pmf& p, int k) {
  if (k < 0) throw std::invalid_argument("convolve_power: negative count");
  Pmf out{1.0};
  for (int i = 0; i < k; ++i) out = convolve(out, p);
  return out;
}

void check_pmf(const Pmf& p, double tol) {
  if (p.empty()) throw std::invalid_argument("pmf: empty");
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("pmf: entry " + std::to_string(v) + " not in [0,1]");
  }
  const double s = pmf_sum(p);
  if (std::abs(s - 1.0) > tol)
    throw std::invalid_argument("pmf: sums to " + std::to_string(s) + ", not 1");
}

}  // namespace cacq
