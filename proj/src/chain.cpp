#include "cacq/chain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "cacq/channel.hpp"
#include "cacq/mmpp.hpp"
#include "cacq/traffic.hpp"

namespace cacq {

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> sums(n, 0.0);
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::int64_t e = row_ptr[r]; e < row_ptr[r + 1]; ++e) s += val[e];
    sums[r] = s;
  }
  return sums;
}

void SparseMatrix::multiply_left(const double* x, double* y) const {
  std::fill(y, y + n, 0.0);
  for (int r = 0; r < n; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (std::int64_t e = row_ptr[r]; e < row_ptr[r + 1]; ++e) y[col[e]] += xr * val[e];
  }
}

double SparseMatrix::residual_l1(const std::vector<double>& pi) const {
  std::vector<double> y(n, 0.0);
  multiply_left(pi.data(), y.data());
  double r = 0.0;
  for (int i = 0; i < n; ++i) r += std::abs(y[i] - pi[i]);
  return r;
}

QueueKernel queue_kernel(const Pmf& arrivals, const Pmf& tx, int L) {
  if (L < 0) throw std::invalid_argument("queue: capacity must be >= 0");
  check_pmf(arrivals);
  check_pmf(tx);

  // Law of the frame-end queue and the expected overflow, as functions of
  // the post-transmission backlog.
  std::vector<std::vector<double>> after(L + 1, std::vector<double>(L + 1, 0.0));
  std::vector<double> drops_after(L + 1, 0.0);
  for (int rem = 0; rem <= L; ++rem) {
    for (std::size_t a = 0; a < arrivals.size(); ++a) {
      const double pa = arrivals[a];
      if (pa == 0.0) continue;
      const long long landed = rem + static_cast<long long>(a);
      after[rem][landed > L ? L : landed] += pa;
      if (landed > L) drops_after[rem] += pa * static_cast<double>(landed - L);
    }
  }

  QueueKernel k;
  k.rows.assign(L + 1, std::vector<double>(L + 1, 0.0));
  k.expected_drops.assign(L + 1, 0.0);
  for (int j = 0; j <= L; ++j) {
    double* row = k.rows[j].data();
    for (std::size_t t = 0; t < tx.size(); ++t) {
      const double pt = tx[t];
      if (pt == 0.0) continue;
      const int rem = std::max(0, j - static_cast<int>(t));
      const double* src = after[rem].data();
      for (int j2 = 0; j2 <= L; ++j2) row[j2] += pt * src[j2];
      k.expected_drops[j] += pt * drops_after[rem];
    }
  }
  return k;
}

TransitionMatrix build_transition_matrix(const SystemConfig& cfg) {
  cfg.validate();

  TransitionMatrix tm;
  tm.indexer = StateIndexer{cfg.queue_size, cfg.threshold()};
  const int L = tm.indexer.L;
  const int K = tm.indexer.K;
  const int n = tm.indexer.size();
  if (n > cfg.state_budget)
    throw NumericError("state budget exceeded: " + std::to_string(n) + " states > " +
                       std::to_string(cfg.state_budget));

  const PhaseMatrix phase = phase_transition_matrix(cfg.mmpp, 1.0);
  const Pmf tx = transmission_pmf(rate_pmf(cfg.channel, cfg.amc), cfg.amc, cfg.channel.subchannels);
  const ConnectionParams conn = cfg.connection_params();

  std::array<Pmf, 2> per_conn;
  std::array<double, 2> per_conn_mean;
  for (int i = 0; i < 2; ++i) {
    per_conn[i] = per_connection_arrival_pmf(cfg.mmpp.rate(i), cfg.arrival_cap);
    per_conn_mean[i] = pmf_mean(per_conn[i]);
  }

  // Aggregate arrival laws for 0..K connections in each phase, then the
  // queue kernel each (phase, k) pair induces.
  std::vector<Pmf> aggregate(2 * (K + 1));
  for (int i = 0; i < 2; ++i) {
    Pmf agg{1.0};
    for (int k = 0; k <= K; ++k) {
      if (k > 0) agg = convolve(agg, per_conn[i]);
      aggregate[i * (K + 1) + k] = agg;
    }
  }
  std::vector<QueueKernel> kernels(2 * (K + 1));
#pragma omp parallel for schedule(dynamic)
  for (int ik = 0; ik < 2 * (K + 1); ++ik) kernels[ik] = queue_kernel(aggregate[ik], tx, L);

  std::vector<ConnectionStep> steps(K + 1);
  for (int k = 0; k <= K; ++k) steps[k] = connection_transition_probs(k, conn);

  tm.expected_drops.assign(n, 0.0);
  tm.mean_arrivals.assign(n, 0.0);

  SparseMatrix& P = tm.P;
  P.n = n;
  P.row_ptr.assign(n + 1, 0);

  auto conn_moves = [&](int k, int k2) -> double {
    if (k2 == k + 1) return steps[k].up;
    if (k2 == k - 1) return steps[k].down;
    if (k2 == k) return steps[k].stay;
    return 0.0;
  };

  // Count row fill, then fill rows; the (i2, j2, k2) loop order emits
  // columns in increasing index order.
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j <= L; ++j) {
      for (int k = 0; k <= K; ++k) {
        const int row = tm.indexer.index(i, j, k);
        const QueueKernel& qk = kernels[i * (K + 1) + k];
        int nz_queue = 0;
        for (int j2 = 0; j2 <= L; ++j2) nz_queue += qk.rows[j][j2] != 0.0;
        int nz_phase = (phase[i][0] != 0.0) + (phase[i][1] != 0.0);
        int nz_conn = 0;
        for (int k2 = std::max(0, k - 1); k2 <= std::min(K, k + 1); ++k2)
          nz_conn += conn_moves(k, k2) != 0.0;
        P.row_ptr[row + 1] = static_cast<std::int64_t>(nz_phase) * nz_conn * nz_queue;
        tm.expected_drops[row] = qk.expected_drops[j];
        tm.mean_arrivals[row] = k * per_conn_mean[i];
      }
    }
  }
  for (int r = 0; r < n; ++r) P.row_ptr[r + 1] += P.row_ptr[r];
  P.col.resize(P.row_ptr[n]);
  P.val.resize(P.row_ptr[n]);

#pragma omp parallel for schedule(static)
  for (int row = 0; row < n; ++row) {
    const auto st = tm.indexer.state(row);
    const QueueKernel& qk = kernels[st.phase * (K + 1) + st.conns];
    std::int64_t e = P.row_ptr[row];
    for (int i2 = 0; i2 < 2; ++i2) {
      const double pp = phase[st.phase][i2];
      if (pp == 0.0) continue;
      for (int j2 = 0; j2 <= L; ++j2) {
        const double pq = qk.rows[st.queue][j2];
        if (pq == 0.0) continue;
        for (int k2 = std::max(0, st.conns - 1); k2 <= std::min(K, st.conns + 1); ++k2) {
          const double pc = conn_moves(st.conns, k2);
          if (pc == 0.0) continue;
          P.col[e] = tm.indexer.index(i2, j2, k2);
          P.val[e] = pp * pq * pc;
          ++e;
        }
      }
    }
  }
  return tm;
}

namespace {

// State-reduction elimination (no subtractions) over a banded row-major
// layout: logical entry (i, j) with |i - j| <= width lives at
// band[i][j - i + width]. width = n - 1 degenerates to a dense solve.
// States are eliminated from the highest index down; elimination without
// pivoting never grows a band, so all loops stay within it.
std::vector<double> gth_solve_band(std::vector<double>& band, int n, int width) {
  const std::size_t stride = 2 * static_cast<std::size_t>(width) + 1;
  auto row = [&](int i) { return &band[i * stride + width - i]; };  // row[i][j] = (i, j)

  for (int s = n - 1; s >= 1; --s) {
    const int first = std::max(0, s - width);
    const double* rs = row(s);
    double total = 0.0;
    for (int j = first; j < s; ++j) total += rs[j];
    if (!(total > 0.0))
      throw NumericError("reducible chain: state " + std::to_string(s) +
                         " cannot reach the remaining states");
    const double inv = 1.0 / total;
    for (int i = first; i < s; ++i) {
      double* ri = row(i);
      const double f = ri[s] * inv;
      ri[s] = f;
      if (f == 0.0) continue;
      for (int j = first; j < s; ++j) ri[j] += f * rs[j];
    }
  }

  // Back substitution, row-major: pi[i] is final before row i is consumed.
  std::vector<double> pi(n, 0.0);
  pi[0] = 1.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double w = pi[i];
    if (w == 0.0) continue;
    const double* ri = row(i);
    const int last = std::min(n - 1, i + width);
    for (int s = i + 1; s <= last; ++s) pi[s] += w * ri[s];
  }
  double total = 0.0;
  for (double v : pi) total += v;
  for (double& v : pi) v /= total;
  return pi;
}

void require_stochastic(const SparseMatrix& P) {
  for (double v : P.val)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("solve: matrix entries must be finite and nonnegative");
  for (double s : P.row_sums())
    if (std::abs(s - 1.0) > 1e-9)
      throw std::invalid_argument("solve: matrix rows must sum to 1");
}

// The canonical (i, j, k) order scatters the k +/- 1 connection transitions
// across the whole index range. Relabeling states as (k, i, j) keeps every
// transition within two connection levels, so the matrix becomes banded with
// width < 4(L+1) regardless of K, and elimination cost drops from n^3 to
// n * width^2.
std::vector<int> level_major_order(const StateIndexer& idx) {
  std::vector<int> new_of_old(idx.size());
  for (int old = 0; old < idx.size(); ++old) {
    const auto st = idx.state(old);
    new_of_old[old] = (st.conns * 2 + st.phase) * (idx.L + 1) + st.queue;
  }
  return new_of_old;
}

int bandwidth(const SparseMatrix& P, const std::vector<int>& new_of_old) {
  int w = 0;
  for (int r = 0; r < P.n; ++r)
    for (std::int64_t e = P.row_ptr[r]; e < P.row_ptr[r + 1]; ++e)
      w = std::max(w, std::abs(new_of_old[r] - new_of_old[P.col[e]]));
  return w;
}

}  // namespace

StationaryDistribution solve_stationary(const TransitionMatrix& tm, SolveMethod method,
                                        double tol, long max_iters) {
  const SparseMatrix& P = tm.P;
  if (P.n <= 0) throw std::invalid_argument("solve: empty chain");
  if (!(tol > 0.0)) throw std::invalid_argument("solve: tolerance must be positive");
  require_stochastic(P);

  StationaryDistribution sd;
  sd.indexer = tm.indexer;
  sd.method = method;

  if (method == SolveMethod::direct) {
    if (tm.indexer.size() != P.n)
      throw std::invalid_argument("solve: indexer does not match the matrix size");

    std::vector<int> new_of_old = level_major_order(tm.indexer);
    std::vector<int> identity(P.n);
    for (int i = 0; i < P.n; ++i) identity[i] = i;
    if (bandwidth(P, identity) <= bandwidth(P, new_of_old)) new_of_old = std::move(identity);
    const int width = std::max(1, bandwidth(P, new_of_old));

    const std::size_t stride = 2 * static_cast<std::size_t>(width) + 1;
    std::vector<double> band(static_cast<std::size_t>(P.n) * stride, 0.0);
    for (int r = 0; r < P.n; ++r) {
      const int i = new_of_old[r];
      for (std::int64_t e = P.row_ptr[r]; e < P.row_ptr[r + 1]; ++e) {
        const int j = new_of_old[P.col[e]];
        band[i * stride + (j - i + width)] += P.val[e];  // duplicates accumulate
      }
    }
    const std::vector<double> permuted = gth_solve_band(band, P.n, width);
    sd.pi.assign(P.n, 0.0);
    for (int r = 0; r < P.n; ++r) sd.pi[r] = permuted[new_of_old[r]];
    sd.residual = P.residual_l1(sd.pi);
    if (sd.residual > tol)
      throw NumericError("direct solve residual " + std::to_string(sd.residual) +
                         " exceeds tolerance");
    return sd;
  }

  // Power iteration from the uniform vector. The step difference
  // ||x P - x||_1 is itself the residual of the current iterate, so the
  // returned vector provably meets tol.
  std::vector<double> x(P.n, 1.0 / P.n);
  std::vector<double> y(P.n, 0.0);
  for (long it = 1; it <= max_iters; ++it) {
    P.multiply_left(x.data(), y.data());
    double diff = 0.0;
    for (int i = 0; i < P.n; ++i) diff += std::abs(y[i] - x[i]);
    if (diff <= tol) {
      sd.pi = std::move(x);
      sd.residual = diff;
      sd.iterations = it;
      return sd;
    }
    double total = 0.0;
    for (double v : y) total += v;
    for (int i = 0; i < P.n; ++i) x[i] = y[i] / total;
  }
  throw NumericError("power method did not reach tolerance " + std::to_string(tol) +
                     " within " + std::to_string(max_iters) + " iterations");
}

StationaryDistribution solve_stationary_auto(const TransitionMatrix& tm,
                                             const SystemConfig& cfg) {
  SolveMethod method;
  switch (cfg.solver) {
    case SolverChoice::direct: method = SolveMethod::direct; break;
    case SolverChoice::power: method = SolveMethod::power; break;
    default:
      method = tm.P.n <= kDirectSolveCutoff ? SolveMethod::direct : SolveMethod::power;
  }
  return solve_stationary(tm, method, cfg.solver_tol, cfg.max_power_iters);
}

double truncation_check(const StationaryDistribution& pi, Mode mode) {
  if (mode != Mode::no_cac)
    throw std::logic_error("truncation check applies to no_cac mode only");
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j <= pi.indexer.L; ++j)
      worst = std::max(worst, pi(i, j, pi.indexer.K));
  return worst;
}

void dump_chain(std::ostream& out, const TransitionMatrix& tm,
                const StationaryDistribution* pi) {
  char buf[64];
  out << "# cacq chain dump\n";
  out << "# states " << tm.P.n << " phases 2 L " << tm.indexer.L << " K " << tm.indexer.K
      << "\n";
  out << "# index(i,j,k) = (i*(L+1) + j)*(K+1) + k\n";
  out << "# P <row> <col> <value>\n";
  for (int r = 0; r < tm.P.n; ++r) {
    for (std::int64_t e = tm.P.row_ptr[r]; e < tm.P.row_ptr[r + 1]; ++e) {
      std::snprintf(buf, sizeof buf, "%.17g", tm.P.val[e]);
      out << "P " << r << ' ' << tm.P.col[e] << ' ' << buf << '\n';
    }
  }
  if (pi != nullptr) {
    out << "# pi <state> <value>\n";
    for (int i = 0; i < tm.P.n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", pi->pi[i]);
      out << "pi " << i << ' ' << buf << '\n';
    }
  }
}

}  // namespace cacq
