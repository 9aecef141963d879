#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cacq/channel.hpp"

using namespace cacq;

namespace {

double tail_at_least(const Pmf& packets, int n) {
  double p = 0.0;
  for (std::size_t i = n; i < packets.size(); ++i) p += packets[i];
  return p;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("table validation") {
  AmcTable bad;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.thresholds_db = {0.0, 5.0};
  bad.packets_per_rate = {1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.packets_per_rate = {2, 1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.thresholds_db = {5.0, 5.0};
  bad.packets_per_rate = {1, 2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  AmcTable good{{0.0, 5.0}, {1, 2}};
  CHECK_NOTHROW(good.validate());
  CHECK(good.max_packets() == 2);
}

TEST_CASE("deterministic fading picks the best feasible rate") {
  const AmcTable table{{0.0, 5.0, 10.0}, {1, 2, 4}};

  ChannelModel m{7.0, Fading::deterministic, 1.0, 1};
  Pmf p = rate_pmf(m, table);
  CHECK(p == Pmf{0.0, 0.0, 1.0, 0.0});  // rate 1

  m.mean_snr_db = -3.0;
  p = rate_pmf(m, table);
  CHECK(p[0] == 1.0);  // below the first threshold: no transmission

  const AmcTable single{{0.0}, {1}};
  m.mean_snr_db = 4.0;
  p = rate_pmf(m, single);
  CHECK(p == Pmf{0.0, 1.0});
}

TEST_CASE("Rayleigh single-threshold tail is exponential") {
  // m = 1: Pr[rate 0] = exp(-gamma0_lin / mean_lin)
  const AmcTable single{{5.0}, {1}};
  const ChannelModel m{5.0, Fading::nakagami, 1.0, 1};
  const Pmf p = rate_pmf(m, single);
  CHECK(p[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("rate pmf is a distribution for assorted shapes") {
  const AmcTable table{{1.5, 4.5, 7.5, 10.5, 14.0, 18.5, 21.0}, {1, 2, 3, 4, 6, 8, 9}};
  for (double m : {0.5, 1.0, 2.5, 7.0}) {
    for (double snr : {-5.0, 0.0, 5.0, 15.0, 30.0}) {
      const Pmf p = rate_pmf({snr, Fading::nakagami, m, 5}, table);
      double total = 0.0;
      for (double v : p) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("raising mean SNR never shrinks any transmission tail") {
  const AmcTable table{{1.5, 4.5, 7.5, 10.5, 14.0, 18.5, 21.0}, {1, 2, 3, 4, 6, 8, 9}};
  const int S = 3;
  Pmf prev;
  for (double snr = -4.0; snr <= 24.0; snr += 0.5) {
    const Pmf packets =
        transmission_pmf(rate_pmf({snr, Fading::nakagami, 1.0, S}, table), table, S);
    if (!prev.empty()) {
      for (int n = 0; n <= table.max_packets() * S; ++n)
        CHECK(tail_at_least(packets, n) >= tail_at_least(prev, n) - 1e-12);
    }
    prev = packets;
  }
}

TEST_CASE("transmission pmf examples") {
  const AmcTable table{{0.0, 5.0}, {1, 2}};
  // craft a rate pmf: no-tx 0, rate0 0.7, rate1 0.3
  const Pmf rates{0.0, 0.7, 0.3};

  const Pmf s0 = transmission_pmf(rates, table, 0);
  CHECK(s0 == Pmf{1.0});

  const Pmf s1 = transmission_pmf(rates, table, 1);
  CHECK(s1[0] == doctest::Approx(0.0));
  CHECK(s1[1] == doctest::Approx(0.7));
  CHECK(s1[2] == doctest::Approx(0.3));

  const Pmf s2 = transmission_pmf(rates, table, 2);
  CHECK(s2[2] == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(s2[3] == doctest::Approx(0.42).epsilon(1e-14));
  CHECK(s2[4] == doctest::Approx(0.09).epsilon(1e-14));

  CHECK_THROWS_AS(transmission_pmf(rates, table, -1), std::invalid_argument);
  CHECK_THROWS_AS(transmission_pmf(Pmf{0.5, 0.5}, table, 1), std::invalid_argument);
}

TEST_CASE("mean scales with the subchannel count") {
  const AmcTable table{{1.5, 4.5, 7.5}, {1, 2, 3}};
  const Pmf rates = rate_pmf({6.0, Fading::nakagami, 1.0, 4}, table);
  const double per = pmf_mean(transmission_pmf(rates, table, 1));
  for (int S : {0, 1, 2, 5}) {
    const Pmf p = transmission_pmf(rates, table, S);
    CHECK(pmf_mean(p) == doctest::Approx(S * per).epsilon(1e-12));
  }
}

TEST_CASE("convolution associativity: S = a + b") {
  const AmcTable table{{1.5, 4.5, 7.5}, {1, 2, 3}};
  const Pmf rates = rate_pmf({4.0, Fading::nakagami, 2.0, 1}, table);
  const Pmf s5 = transmission_pmf(rates, table, 5);
  const Pmf s2 = transmission_pmf(rates, table, 2);
  const Pmf s3 = transmission_pmf(rates, table, 3);
  const Pmf joined = convolve(s2, s3);
  REQUIRE(joined.size() == s5.size());
  for (std::size_t i = 0; i < s5.size(); ++i)
    CHECK(joined[i] == doctest::Approx(s5[i]).epsilon(1e-12));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(rate_pmf({5.0, Fading::nakagami, 0.2, 1}, AmcTable{{0.0}, {1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(rate_pmf({5.0, Fading::nakagami, 1.0, -1}, AmcTable{{0.0}, {1}}),
                  std::invalid_argument);
}

}  // TEST_SUITE
