#pragma once

// Shared test scenarios. `tiny` is small enough to enumerate exhaustively
// (24 states); `desk` has fast connection dynamics so a short simulation
// sees plenty of connection events.

#include "cacq/config.hpp"

namespace testcfg {

inline cacq::SystemConfig tiny() {
  cacq::SystemConfig c;
  c.mmpp = {0.3, 0.25, 0.5, 1.2};
  c.rho = 0.3;
  c.mean_holding = 5.0;
  c.frame = 1.0;
  c.cac_threshold = 2;
  c.no_cac_truncation = 2;
  c.mode = cacq::Mode::cac;
  c.queue_size = 3;
  c.arrival_cap = 2;
  c.channel = {6.0, cacq::Fading::nakagami, 1.0, 1};
  c.amc.thresholds_db = {0.0, 8.0};
  c.amc.packets_per_rate = {1, 2};
  return c;
}

inline cacq::SystemConfig desk() {
  cacq::SystemConfig c;
  c.mmpp = {0.05, 0.05, 0.6, 1.6};
  c.rho = 0.01;
  c.mean_holding = 200.0;
  c.frame = 1.0;
  c.cac_threshold = 5;
  c.no_cac_truncation = 20;
  c.mode = cacq::Mode::cac;
  c.queue_size = 20;
  c.arrival_cap = 3;
  c.channel = {6.0, cacq::Fading::nakagami, 1.0, 2};
  c.amc.thresholds_db = {0.0, 6.0, 12.0};
  c.amc.packets_per_rate = {1, 2, 3};
  return c;
}

}  // namespace testcfg
