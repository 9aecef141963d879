#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cacq/chain.hpp"
#include "cacq/metrics.hpp"
#include "cacq/mmpp.hpp"
#include "cacq/traffic.hpp"
#include "configs.hpp"
#include "oracles.hpp"

using namespace cacq;

TEST_SUITE("chain") {

TEST_CASE("state indexing is the canonical row-major bijection") {
  const StateIndexer idx{5, 3};
  CHECK(idx.size() == 2 * 6 * 4);
  int expected = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j <= idx.L; ++j) {
      for (int k = 0; k <= idx.K; ++k) {
        const int s = idx.index(i, j, k);
        CHECK(s == expected++);
        CHECK(s == i * (idx.L + 1) * (idx.K + 1) + j * (idx.K + 1) + k);
        const auto st = idx.state(s);
        CHECK(st.phase == i);
        CHECK(st.queue == j);
        CHECK(st.conns == k);
      }
    }
  }
}

TEST_CASE("queue kernel: degenerate cases") {
  // nothing moves
  QueueKernel k = queue_kernel(Pmf{1.0}, Pmf{1.0}, 3);
  for (int j = 0; j <= 3; ++j) {
    CHECK(k.rows[j][j] == 1.0);
    CHECK(k.expected_drops[j] == 0.0);
  }

  // full buffer, one arrival, no service: the arrival is dropped
  k = queue_kernel(Pmf{0.0, 1.0}, Pmf{1.0}, 1);
  CHECK(k.rows[1][1] == 1.0);
  CHECK(k.expected_drops[1] == 1.0);

  // L=2, j=1, arrivals {0: .5, 2: .5}, tx {1: 1}: next is 0 or 2, no drops
  k = queue_kernel(Pmf{0.5, 0.0, 0.5}, Pmf{0.0, 1.0}, 2);
  CHECK(k.rows[1][0] == doctest::Approx(0.5));
  CHECK(k.rows[1][2] == doctest::Approx(0.5));
  CHECK(k.expected_drops[1] == 0.0);
}

TEST_CASE("queue kernel matches exhaustive enumeration") {
  std::mt19937 gen(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int L = 1 + static_cast<int>(gen() % 8);
    Pmf arrivals(1 + gen() % 10), tx(1 + gen() % 6);
    double sa = 0.0, st = 0.0;
    for (double& v : arrivals) sa += (v = u(gen));
    for (double& v : tx) st += (v = u(gen));
    for (double& v : arrivals) v /= sa;
    for (double& v : tx) v /= st;

    const QueueKernel k = queue_kernel(arrivals, tx, L);
    for (int j = 0; j <= L; ++j) {
      const auto want = oracles::enumerate_queue_step(j, arrivals, tx, L);
      double row_sum = 0.0;
      for (int j2 = 0; j2 <= L; ++j2) {
        CHECK(k.rows[j][j2] == doctest::Approx(want.row[j2]).epsilon(1e-13));
        row_sum += k.rows[j][j2];
      }
      CHECK(std::abs(row_sum - 1.0) <= 1e-12);
      CHECK(k.expected_drops[j] == doctest::Approx(want.expected_drops).epsilon(1e-12));
    }
  }
}

TEST_CASE("paper-scale build: state count and stochastic rows") {
  SystemConfig cfg = testcfg::desk();
  cfg.queue_size = 150;
  cfg.cac_threshold = 10;
  cfg.arrival_cap = 30;
  cfg.channel.subchannels = 5;
  const TransitionMatrix tm = build_transition_matrix(cfg);
  CHECK(tm.P.n == 2 * 151 * 11);
  CHECK(tm.P.n == 3322);
  for (double s : tm.P.row_sums()) CHECK(std::abs(s - 1.0) <= 1e-12);
  for (double d : tm.expected_drops) CHECK(d >= 0.0);
}

TEST_CASE("L = 0 entries are the product of the three factors") {
  SystemConfig cfg = testcfg::tiny();
  cfg.queue_size = 0;
  cfg.cac_threshold = 1;
  cfg.mmpp = {0.4, 0.6, 0.0, 0.0};  // no arrivals: queue factor is identity
  const TransitionMatrix tm = build_transition_matrix(cfg);
  REQUIRE(tm.P.n == 4);

  const PhaseMatrix ph = phase_transition_matrix(cfg.mmpp, 1.0);
  const ConnectionParams cp = cfg.connection_params();
  const auto dense = oracles::to_dense(tm.P);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k <= 1; ++k) {
      const ConnectionStep step = connection_transition_probs(k, cp);
      for (int i2 = 0; i2 < 2; ++i2) {
        for (int k2 = 0; k2 <= 1; ++k2) {
          const double conn = k2 == k + 1 ? step.up : k2 + 1 == k ? step.down
                                          : k2 == k ? step.stay : 0.0;
          const double want = ph[i][i2] * conn;
          CHECK(dense[tm.indexer.index(i, 0, k)][tm.indexer.index(i2, 0, k2)] ==
                doctest::Approx(want).epsilon(1e-15));
        }
      }
    }
  }

  // with arrivals but L = 0, every arriving packet is dropped
  cfg.mmpp = {0.4, 0.6, 0.7, 1.3};
  const TransitionMatrix drops = build_transition_matrix(cfg);
  const Pmf per0 = per_connection_arrival_pmf(0.7, cfg.arrival_cap);
  CHECK(drops.expected_drops[drops.indexer.index(0, 0, 1)] ==
        doctest::Approx(pmf_mean(per0)).epsilon(1e-13));
  CHECK(drops.expected_drops[drops.indexer.index(0, 0, 0)] == 0.0);
}

TEST_CASE("state budget overflow") {
  SystemConfig cfg = testcfg::tiny();
  cfg.state_budget = 10;
  CHECK_THROWS_AS(build_transition_matrix(cfg), NumericError);
}

TEST_CASE("two-state solves") {
  // periodic flip-flop: direct handles it
  TransitionMatrix tm;
  tm.indexer = StateIndexer{0, 0};
  tm.P.n = 2;
  tm.P.row_ptr = {0, 1, 2};
  tm.P.col = {1, 0};
  tm.P.val = {1.0, 1.0};
  tm.expected_drops.assign(2, 0.0);
  tm.mean_arrivals.assign(2, 0.0);
  auto sd = solve_stationary(tm, SolveMethod::direct);
  CHECK(sd.pi[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sd.pi[1] == doctest::Approx(0.5).epsilon(1e-15));

  // lazy chain: balance gives (2/3, 1/3)
  tm.P.row_ptr = {0, 2, 4};
  tm.P.col = {0, 1, 0, 1};
  tm.P.val = {0.9, 0.1, 0.2, 0.8};
  sd = solve_stationary(tm, SolveMethod::direct);
  CHECK(sd.pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(sd.pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const auto power = solve_stationary(tm, SolveMethod::power, 1e-13);
  CHECK(power.pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  CHECK(power.iterations > 0);
  CHECK(power.residual <= 1e-13);
}

TEST_CASE("solver input validation and failure modes") {
  TransitionMatrix tm;
  tm.indexer = StateIndexer{0, 0};
  tm.P.n = 2;
  tm.P.row_ptr = {0, 2, 4};
  tm.P.col = {0, 1, 0, 1};
  tm.P.val = {0.9, 0.2, 0.2, 0.8};  // row 0 sums to 1.1
  tm.expected_drops.assign(2, 0.0);
  tm.mean_arrivals.assign(2, 0.0);
  CHECK_THROWS_AS(solve_stationary(tm, SolveMethod::direct), std::invalid_argument);

  // reducible: two absorbing states
  tm.P.val = {1.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(solve_stationary(tm, SolveMethod::direct), NumericError);

  // iteration cap
  tm.P.val = {0.9, 0.1, 0.2, 0.8};
  CHECK_THROWS_AS(solve_stationary(tm, SolveMethod::power, 1e-14, 1), NumericError);

  // indexer must describe the matrix
  tm.indexer = StateIndexer{1, 1};  // size 8 != 2
  CHECK_THROWS_AS(solve_stationary(tm, SolveMethod::direct), std::invalid_argument);
}

TEST_CASE("direct, power, reference and dense-linear solves agree on random chains") {
  for (int n : {2, 4, 6, 10, 16, 40, 60}) {
    const TransitionMatrix tm = oracles::random_chain(n, 1000 + n);
    const auto direct = solve_stationary(tm, SolveMethod::direct, 1e-10);
    const auto power = solve_stationary(tm, SolveMethod::power, 1e-13);
    const auto ref = oracles::gth_reference(oracles::to_dense(tm.P));
    const auto dense = oracles::eigen_stationary(tm.P);

    CHECK(oracles::l1_diff(direct.pi, ref) <= 1e-13);
    CHECK(oracles::l1_diff(direct.pi, dense) <= 1e-11);
    CHECK(oracles::l1_diff(direct.pi, power.pi) <= 10 * 1e-13);  // 10 * power tol
    CHECK(direct.residual <= 1e-12);
    double total = 0.0;
    for (double v : direct.pi) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("24-state pipeline: direct vs power vs dense oracle") {
  const SystemConfig cfg = testcfg::tiny();
  const TransitionMatrix tm = build_transition_matrix(cfg);
  REQUIRE(tm.P.n == 24);

  const auto direct = solve_stationary(tm, SolveMethod::direct, 1e-10);
  const auto power = solve_stationary(tm, SolveMethod::power, 1e-14);
  const auto dense = oracles::eigen_stationary(tm.P);
  const auto ref = oracles::gth_reference(oracles::to_dense(tm.P));

  for (int s = 0; s < 24; ++s) {
    CHECK(std::abs(direct.pi[s] - power.pi[s]) <= 1e-12);
    CHECK(std::abs(direct.pi[s] - dense[s]) <= 1e-12);
    CHECK(std::abs(direct.pi[s] - ref[s]) <= 1e-13);
  }
  // this chain mixes fast, so the residual-based stop also bounds the
  // true error: the two methods land within 10x of the power tolerance
  CHECK(oracles::l1_diff(direct.pi, power.pi) <= 10 * 1e-14);
}

TEST_CASE("connection marginal follows the Erlang loss law") {
  // paper-style rates on a reduced queue; load = rho * mean_holding = 4
  SystemConfig cfg = testcfg::desk();
  cfg.mmpp = {0.2, 0.2, 1.0, 2.0};
  cfg.rho = 0.4;
  cfg.mean_holding = 10.0;
  cfg.frame = 1.0 / 60000.0;
  cfg.cac_threshold = 6;
  cfg.queue_size = 12;
  cfg.arrival_cap = 8;
  const TransitionMatrix tm = build_transition_matrix(cfg);
  const auto pi = solve_stationary(tm, SolveMethod::direct, 1e-10);

  std::vector<double> marginal(cfg.cac_threshold + 1, 0.0);
  for (int s = 0; s < tm.P.n; ++s) marginal[tm.indexer.state(s).conns] += pi.pi[s];
  const auto want = oracles::erlang_loss_pmf(4.0, cfg.cac_threshold);
  for (int k = 0; k <= cfg.cac_threshold; ++k)
    CHECK(std::abs(marginal[k] - want[k]) / want[k] <= 0.005);
}

TEST_CASE("phase marginal equals the modulating chain's stationary law") {
  const SystemConfig cfg = testcfg::desk();
  const TransitionMatrix tm = build_transition_matrix(cfg);
  const auto pi = solve_stationary(tm, SolveMethod::direct, 1e-10);
  const auto want = steady_state(cfg.mmpp);
  double phase0 = 0.0;
  for (int s = 0; s < tm.P.n; ++s)
    if (tm.indexer.state(s).phase == 0) phase0 += pi.pi[s];
  CHECK(std::abs(phase0 - want[0]) <= 1e-8);
}

TEST_CASE("truncation check") {
  SystemConfig cfg = testcfg::tiny();
  cfg.mode = Mode::no_cac;
  const TransitionMatrix tm = build_transition_matrix(cfg);
  const auto pi = solve_stationary(tm, SolveMethod::direct, 1e-10);

  CHECK_THROWS_AS(truncation_check(pi, Mode::cac), std::logic_error);

  double expected = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j <= tm.indexer.L; ++j)
      expected = std::max(expected, pi(i, j, tm.indexer.K));
  CHECK(truncation_check(pi, Mode::no_cac) == expected);
  CHECK(expected > 0.0);

  // with nothing ever admitted, no boundary mass
  SystemConfig idle = cfg;
  idle.rho = 0.0;
  const TransitionMatrix tidle = build_transition_matrix(idle);
  const auto pidle = solve_stationary(tidle, SolveMethod::direct, 1e-10);
  CHECK(truncation_check(pidle, Mode::no_cac) == 0.0);
}

TEST_CASE("chain dump round-trips through the documented format") {
  const SystemConfig cfg = testcfg::tiny();
  const TransitionMatrix tm = build_transition_matrix(cfg);
  const auto pi = solve_stationary(tm, SolveMethod::direct, 1e-10);

  std::ostringstream out;
  dump_chain(out, tm, &pi);
  std::istringstream in(out.str());

  auto dense = oracles::to_dense(tm.P);
  std::string tag;
  int entries = 0, pis = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ls >> tag;
    if (tag == "P") {
      int r, c;
      double v;
      ls >> r >> c >> v;
      CHECK(dense[r][c] == v);  // %.17g is lossless
      ++entries;
    } else if (tag == "pi") {
      int s;
      double v;
      ls >> s >> v;
      CHECK(pi.pi[s] == v);
      ++pis;
    }
  }
  CHECK(entries == tm.P.nnz());
  CHECK(pis == tm.P.n);
}

}  // TEST_SUITE
