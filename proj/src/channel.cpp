#include "cacq/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace cacq {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

int AmcTable::max_packets() const {
  return packets_per_rate.empty() ? 0 : packets_per_rate.back();
}

void AmcTable::validate() const {
  if (thresholds_db.empty()) throw std::invalid_argument("amc: table must have at least one rate");
  if (thresholds_db.size() != packets_per_rate.size())
    throw std::invalid_argument("amc: thresholds and packet counts differ in length");
  for (std::size_t r = 1; r < thresholds_db.size(); ++r) {
    if (!(thresholds_db[r] > thresholds_db[r - 1]))
      throw std::invalid_argument("amc: thresholds must be strictly increasing");
  }
  for (std::size_t r = 0; r < packets_per_rate.size(); ++r) {
    if (packets_per_rate[r] < 0)
      throw std::invalid_argument("amc: packet counts must be nonnegative");
    if (r > 0 && packets_per_rate[r] < packets_per_rate[r - 1])
      throw std::invalid_argument("amc: packet counts must be nondecreasing");
  }
}

void ChannelModel::validate() const {
  if (!std::isfinite(mean_snr_db)) throw std::invalid_argument("channel: mean SNR must be finite");
  if (fading == Fading::nakagami && !(nakagami_m >= 0.5))
    throw std::invalid_argument("channel: nakagami shape must be >= 0.5");
  if (subchannels < 0) throw std::invalid_argument("channel: subchannel count must be >= 0");
}

Pmf rate_pmf(const ChannelModel& model, const AmcTable& table) {
  model.validate();
  table.validate();
  const int R = table.rates();
  Pmf pmf(R + 1, 0.0);

  if (model.fading == Fading::deterministic) {
    int best = -1;
    for (int r = 0; r < R; ++r)
      if (model.mean_snr_db >= table.thresholds_db[r]) best = r;
    pmf[best + 1] = 1.0;
    return pmf;
  }

  // Nakagami-m block fading: instantaneous SNR is Gamma(m, mean/m), so
  // Pr[snr >= x] = Q(m, m x / mean) with Q the regularized upper incomplete
  // gamma function.
  const double mean_lin = db_to_linear(model.mean_snr_db);
  const double m = model.nakagami_m;
  auto tail = [&](double threshold_db) {
    return boost::math::gamma_q(m, m * db_to_linear(threshold_db) / mean_lin);
  };
  double above = tail(table.thresholds_db[0]);
  pmf[0] = 1.0 - above;
  for (int r = 0; r < R; ++r) {
    const double next = r + 1 < R ? tail(table.thresholds_db[r + 1]) : 0.0;
    pmf[r + 1] = above - next;
    above = next;
  }
  check_pmf(pmf);
  return pmf;
}

Pmf transmission_pmf(const Pmf& rates, const AmcTable& table, int subchannels) {
  if (subchannels < 0) throw std::invalid_argument("channel: subchannel count must be >= 0");
  if (rates.size() != static_cast<std::size_t>(table.rates()) + 1)
    throw std::invalid_argument("channel: rate pmf does not match the table");
  check_pmf(rates);

  Pmf per_subchannel(table.max_packets() + 1, 0.0);
  per_subchannel[0] += rates[0];  // no transmission
  for (int r = 0; r < table.rates(); ++r)
    per_subchannel[table.packets_per_rate[r]] += rates[r + 1];

  return convolve_power(per_subchannel, subchannels);
}

}  // namespace cacq
