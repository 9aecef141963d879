#pragma once

#include <vector>

namespace cacq {

// Probability mass function on {0, 1, ..., size()-1}.
using Pmf = std::vector<double>;

double pmf_sum(const Pmf& p);
double pmf_mean(const Pmf& p);

// Distribution of X + Y for independent X ~ a, Y ~ b.
Pmf convolve(const Pmf& a, const Pmf& b);

// k-fold self-convolution; k = 0 is the unit mass at 0.
Pmf convolve_power(const Pmf& p, int k);

// Throws std::invalid_argument unless entries are nonnegative and sum to 1 within tol.
void check_pmf(const Pmf& p, double tol = 1e-12);

}  // namespace cacq
