#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cacq/config.hpp"
#include "cacq/pmf.hpp"

namespace cacq {

// Numerical failures that are not input errors: non-convergence, reducible
// chains, exceeded state budgets.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Canonical row-major indexing of the state space
//   E = {(i, j, k) : i in {0,1}, 0 <= j <= L, 0 <= k <= K}.
struct StateIndexer {
  int L = 0;  // queue capacity, packets
  int K = 0;  // max connections

  struct State {
    int phase;
    int queue;
    int conns;
  };

  int size() const { return 2 * (L + 1) * (K + 1); }

  int index(int phase, int queue, int conns) const {
    return (phase * (L + 1) + queue) * (K + 1) + conns;
  }

  State state(int idx) const {
    const int conns = idx % (K + 1);
    idx /= K + 1;
    return State{idx / (L + 1), idx % (L + 1), conns};
  }

  bool operator==(const StateIndexer&) const = default;
};

// Square sparse matrix, compressed rows.
struct SparseMatrix {
  int n = 0;
  std::vector<std::int64_t> row_ptr;  // size n + 1
  std::vector<int> col;
  std::vector<double> val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }
  std::vector<double> row_sums() const;

  // y = x P (left multiply by a row vector).
  void multiply_left(const double* x, double* y) const;

  // ||pi P - pi||_1
  double residual_l1(const std::vector<double>& pi) const;
};

// One-frame queue evolution for a fixed arrival and transmission law:
// transmit from the frame-start backlog, then append arrivals, then drop
// overflow, j' = min(L, max(0, j - t) + a).
struct QueueKernel {
  std::vector<std::vector<double>> rows;  // rows[j][j'], each row sums to 1
  std::vector<double> expected_drops;     // E[overflow | j]
};

QueueKernel queue_kernel(const Pmf& arrivals, const Pmf& tx, int L);

// The assembled chain plus the per-state companion vectors metrics need.
struct TransitionMatrix {
  StateIndexer indexer;
  SparseMatrix P;
  std::vector<double> expected_drops;  // E[dropped packets | frame starts in state]
  std::vector<double> mean_arrivals;   // E[arriving packets | frame starts in state]
};

// P[(i,j,k) -> (i',j',k')] = PhaseStep[i][i'] * ConnStep(k)[k'] *
// QueueKernel_{i,k}[j][j'], with the queue kernel driven by the aggregate
// arrivals of k connections in phase i. Throws NumericError when the state
// count exceeds cfg.state_budget.
TransitionMatrix build_transition_matrix(const SystemConfig& cfg);

enum class SolveMethod { direct, power };

struct StationaryDistribution {
  StateIndexer indexer;
  std::vector<double> pi;
  double residual = 0.0;  // ||pi P - pi||_1 of the returned vector
  long iterations = 0;    // power method only
  SolveMethod method = SolveMethod::direct;

  double operator()(int phase, int queue, int conns) const {
    return pi[indexer.index(phase, queue, conns)];
  }
};

// `direct` is state-reduction elimination with no subtractions; `power`
// iterates from the uniform vector until successive iterates differ by at
// most tol in 1-norm. Throws NumericError on reducible chains (zero pivot)
// or when the power method hits max_iters.
StationaryDistribution solve_stationary(const TransitionMatrix& tm, SolveMethod method,
                                        double tol = 1e-10, long max_iters = 2000000);

// Picks direct for small chains and power iteration above the cutoff.
StationaryDistribution solve_stationary_auto(const TransitionMatrix& tm,
                                             const SystemConfig& cfg);

inline constexpr int kDirectSolveCutoff = 20000;

// Largest boundary-state probability max_{i,j} pi(i, j, K). Only meaningful
// when connections are truncated rather than admission-controlled; throws
// std::logic_error in cac mode.
double truncation_check(const StationaryDistribution& pi, Mode mode);

// Plain-text sparse triplet dump of P (and pi when given): a commented
// header with N, L, K, then `P row col value` and `pi index value` lines.
void dump_chain(std::ostream& out, const TransitionMatrix& tm,
                const StationaryDistribution* pi = nullptr);

}  // namespace cacq
