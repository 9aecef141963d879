#include "cacq/sim.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "cacq/channel.hpp"
#include "cacq/mmpp.hpp"
#include "cacq/traffic.hpp"

namespace cacq {

namespace {

constexpr double kZ99 = 2.5758293035489008;  // two-sided 99% normal quantile

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// One RNG stream per stochastic component, each seeded from the master seed
// and a fixed tag, so a change in how one component draws never perturbs the
// others. Uniforms come from the top 53 bits, identical on every platform.
struct Stream {
  std::mt19937_64 engine;

  Stream(std::uint64_t master, std::uint64_t tag) {
    std::uint64_t s = master ^ (tag * 0xA3EC647659359ACDull);
    splitmix64(s);
    engine.seed(splitmix64(s));
  }

  double uniform() { return (engine() >> 11) * 0x1.0p-53; }
};

std::vector<double> cumulative(const Pmf& p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  return cdf;
}

int sample(const std::vector<double>& cdf, double u) {
  int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (u < cdf[mid]) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

// Batch-means estimate: the point value is the ratio of window totals, the
// standard error comes from the scatter of per-batch ratios. No samples at
// all (zero denominator) reports NaN rather than a confident zero.
Estimate estimate(const std::vector<double>& num, const std::vector<double>& den) {
  Estimate e;
  double total_num = 0.0, total_den = 0.0;
  std::vector<double> ratios;
  for (std::size_t b = 0; b < num.size(); ++b) {
    total_num += num[b];
    total_den += den[b];
    if (den[b] > 0.0) ratios.push_back(num[b] / den[b]);
  }
  e.value = total_den > 0.0 ? total_num / total_den
                            : std::numeric_limits<double>::quiet_NaN();
  if (ratios.size() >= 2) {
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= ratios.size();
    double ss = 0.0;
    for (double r : ratios) ss += (r - mean) * (r - mean);
    e.se = std::sqrt(ss / (ratios.size() * (ratios.size() - 1.0)));
  } else {
    e.se = std::numeric_limits<double>::quiet_NaN();
  }
  e.ci99 = kZ99 * e.se;
  return e;
}

}  // namespace

void SimConfig::validate() const {
  if (frames <= warmup) throw std::invalid_argument("sim: frames must exceed warmup");
  if (warmup < 0) throw std::invalid_argument("sim: warmup must be >= 0");
  if (batches < 2) throw std::invalid_argument("sim: need at least 2 batches");
  if ((frames - warmup) / batches < 1)
    throw std::invalid_argument("sim: fewer than one frame per batch");
}

SimReport simulate(const SystemConfig& cfg, const SimConfig& sim) {
  cfg.validate();
  sim.validate();

  const int L = cfg.queue_size;
  const int K = cfg.threshold();
  const ConnectionParams conn = cfg.connection_params();

  const PhaseMatrix phase_step = phase_transition_matrix(cfg.mmpp, 1.0);
  const std::array<double, 2> stay0 = {phase_step[0][0], phase_step[1][0]};

  std::array<std::vector<double>, 2> arrival_cdf;
  for (int i = 0; i < 2; ++i)
    arrival_cdf[i] = cumulative(per_connection_arrival_pmf(cfg.mmpp.rate(i), cfg.arrival_cap));

  // Per-subchannel packets pmf; subchannels are sampled one by one.
  const Pmf rates = rate_pmf(cfg.channel, cfg.amc);
  Pmf per_subchannel(cfg.amc.max_packets() + 1, 0.0);
  per_subchannel[0] += rates[0];
  for (int r = 0; r < cfg.amc.rates(); ++r)
    per_subchannel[cfg.amc.packets_per_rate[r]] += rates[r + 1];
  const std::vector<double> channel_cdf = cumulative(per_subchannel);

  const double p_attempt = -std::expm1(-conn.rho * conn.frame);
  std::vector<double> p_depart(K + 1);
  for (int k = 0; k <= K; ++k)
    p_depart[k] = -std::expm1(-k * conn.departure_rate() * conn.frame);

  Stream phase_rng(sim.seed, 1);
  Stream conn_rng(sim.seed, 2);
  Stream arrival_rng(sim.seed, 3);
  Stream channel_rng(sim.seed, 4);

  const std::int64_t batch_len = (sim.frames - sim.warmup) / sim.batches;
  const std::int64_t frames_run = sim.warmup + batch_len * sim.batches;
  const int B = sim.batches;

  std::vector<double> b_k(B, 0.0), b_j(B, 0.0), b_frames(B, 0.0);
  std::vector<double> b_arrived(B, 0.0), b_dropped(B, 0.0), b_served(B, 0.0);
  std::vector<double> b_delay(B, 0.0), b_delay_n(B, 0.0);
  std::vector<double> b_offered(B, 0.0), b_blocked(B, 0.0);

  SimReport rep;
  rep.frames_run = frames_run;

  int phase = 0, k = 0;
  std::int64_t backlog = 0;
  std::deque<std::pair<std::int64_t, std::int64_t>> fifo;  // (arrival frame, packets)

  for (std::int64_t f = 0; f < frames_run; ++f) {
    const int b = f >= sim.warmup ? static_cast<int>((f - sim.warmup) / batch_len) : -1;
    if (b >= 0) {
      b_k[b] += k;
      b_j[b] += static_cast<double>(backlog);
      b_frames[b] += 1.0;
    }

    // service opportunity for this frame
    std::int64_t tx = 0;
    for (int s = 0; s < cfg.channel.subchannels; ++s)
      tx += sample(channel_cdf, channel_rng.uniform());

    // packet arrivals from the k frame-start connections, phase-dependent
    std::int64_t arrivals = 0;
    for (int c = 0; c < k; ++c)
      arrivals += sample(arrival_cdf[phase], arrival_rng.uniform());

    // at most one connection event per frame, mirroring the chain kernel
    const bool attempt = conn_rng.uniform() < p_attempt;
    const bool depart = conn_rng.uniform() < p_depart[k];
    if (attempt) {
      ++rep.offered;
      if (k == K) ++rep.blocked;
      if (b >= 0) {
        b_offered[b] += 1.0;
        if (k == K) b_blocked[b] += 1.0;
      }
    }
    int k_next = k;
    if (attempt && !depart && k < K) k_next = k + 1;
    else if (depart && !attempt) k_next = k - 1;

    const int phase_next = phase_rng.uniform() < stay0[phase] ? 0 : 1;

    // transmit from the frame-start backlog, then append arrivals, then drop
    std::int64_t to_serve = std::min(tx, backlog);
    rep.served += to_serve;
    if (b >= 0) b_served[b] += static_cast<double>(to_serve);
    backlog -= to_serve;
    while (to_serve > 0) {
      auto& [arrived_at, count] = fifo.front();
      const std::int64_t take = std::min(to_serve, count);
      if (b >= 0) {
        b_delay[b] += static_cast<double>(take) * static_cast<double>(f - arrived_at);
        b_delay_n[b] += static_cast<double>(take);
      }
      count -= take;
      to_serve -= take;
      if (count == 0) fifo.pop_front();
    }

    const std::int64_t kept = std::min<std::int64_t>(arrivals, L - backlog);
    const std::int64_t lost = arrivals - kept;
    rep.arrived += arrivals;
    rep.dropped += lost;
    if (b >= 0) {
      b_arrived[b] += static_cast<double>(arrivals);
      b_dropped[b] += static_cast<double>(lost);
    }
    if (kept > 0) fifo.emplace_back(f, kept);
    backlog += kept;

    phase = phase_next;
    k = k_next;
  }

  rep.final_backlog = backlog;

  rep.p_block = estimate(b_blocked, b_offered);
  rep.n_connections = estimate(b_k, b_frames);
  rep.n_queue = estimate(b_j, b_frames);
  rep.n_drop = estimate(b_dropped, b_frames);
  rep.lambda_bar = estimate(b_arrived, b_frames);
  rep.p_drop = estimate(b_dropped, b_arrived);
  rep.throughput = estimate(b_served, b_frames);
  rep.delay = estimate(b_delay, b_delay_n);
  return rep;
}

}  // namespace cacq
