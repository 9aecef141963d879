#pragma once

#include <vector>

#include "cacq/pmf.hpp"

namespace cacq {

// Adaptive modulation-and-coding lookup. A subchannel whose instantaneous
// SNR lies in [thresholds_db[r], thresholds_db[r+1]) uses rate ID r and
// carries packets_per_rate[r] packets per frame; SNR below thresholds_db[0]
// carries nothing.
struct AmcTable {
  std::vector<double> thresholds_db;   // strictly increasing
  std::vector<int> packets_per_rate;   // nonnegative, nondecreasing

  int rates() const { return static_cast<int>(thresholds_db.size()); }
  int max_packets() const;

  void validate() const;

  bool operator==(const AmcTable&) const = default;
};

enum class Fading {
  deterministic,  // always the best rate the mean SNR affords
  nakagami,       // Nakagami-m block fading, i.i.d. per subchannel and frame
};

struct ChannelModel {
  double mean_snr_db = 0.0;
  Fading fading = Fading::nakagami;
  double nakagami_m = 1.0;  // m = 1 is Rayleigh
  int subchannels = 0;

  void validate() const;

  bool operator==(const ChannelModel&) const = default;
};

// Pmf over per-subchannel rate outcomes; index 0 is "no transmission",
// index r + 1 is rate ID r.
Pmf rate_pmf(const ChannelModel& model, const AmcTable& table);

// Pmf of packets transmitted per frame across `subchannels` i.i.d.
// subchannels, obtained by mapping rate outcomes to packet counts and
// convolving.
Pmf transmission_pmf(const Pmf& rates, const AmcTable& table, int subchannels);

}  // namespace cacq
