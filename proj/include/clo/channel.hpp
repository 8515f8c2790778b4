#pragma once

#include <optional>
#include <vector>

#include "clo/network.hpp"
#include "clo/rng.hpp"

namespace clo {

enum class Fading {
  rayleigh,  // unit-mean exponential power gain
  none,      // gain fixed at the average path loss
};

/// Linear power gain per link, path loss included.
struct ChannelMatrix {
  std::vector<double> gain;
};

struct LinkBudget {
  double capacity_bps = 0.0;
  double delay_s = 0.0;
  double energy_j = 0.0;
  double power_w = 0.0;
};

double dbm_per_hz_to_w_per_hz(double dbm_per_hz);
double db_to_linear(double db);

ChannelMatrix sample_channels(const Network& network, Rng& rng, Fading fading = Fading::rayleigh);

/// Shannon capacity B log2(1 + P S / (B N0)) in bits/s.
double capacity(double power_w, double gain, double bandwidth_hz, double noise_w_per_hz);

/// Smallest power that delivers `bits` within one slot, or nullopt when it
/// exceeds `power_cap_w` or the link is dead.
std::optional<double> min_power_for_slot(double bits, double gain, double bandwidth_hz,
                                         double noise_w_per_hz, double slot_s,
                                         double power_cap_w);

/// E = P W / C. Throws std::domain_error when C is not positive.
double link_energy(double power_w, double bits, double capacity_bps);

LinkBudget link_budget(double power_w, double bits, double gain, double bandwidth_hz,
                       double noise_w_per_hz);

}  // namespace clo
