#include "clo/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace clo {

double dbm_per_hz_to_w_per_hz(double dbm_per_hz) { return std::pow(10.0, (dbm_per_hz - 30.0) / 10.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ChannelMatrix sample_channels(const Network& network, Rng& rng, Fading fading) {
  ChannelMatrix out;
  out.gain.resize(network.link_count());
  std::exponential_distribution<double> unit(1.0);
  for (std::size_t e = 0; e < network.link_count(); ++e) {
    const double mean = db_to_linear(-network.link(e).path_loss_db);
    // always draw so that the stream does not depend on the fading mode
    const double x = unit(rng);
    out.gain[e] = fading == Fading::rayleigh ? mean * x : mean;
  }
  return out;
}

double capacity(double power_w, double gain, double bandwidth_hz, double noise_w_per_hz) {
  if (power_w <= 0.0 || gain <= 0.0) return 0.0;
  return bandwidth_hz * std::log2(1.0 + power_w * gain / (bandwidth_hz * noise_w_per_hz));
}

std::optional<double> min_power_for_slot(double bits, double gain, double bandwidth_hz,
                                         double noise_w_per_hz, double slot_s,
                                         double power_cap_w) {
  if (!(gain > 0.0)) return std::nullopt;
  const double p = std::expm1(bits / (slot_s * bandwidth_hz) * std::log(2.0)) * bandwidth_hz *
                   noise_w_per_hz / gain;
  if (!std::isfinite(p) || p > power_cap_w) return std::nullopt;
  return p;
}

double link_energy(double power_w, double bits, double capacity_bps) {
  if (!(capacity_bps > 0.0)) {
    if (power_w == 0.0) return 0.0;
    throw std::domain_error("link_energy: capacity must be positive");
  }
  return power_w * bits / capacity_bps;
}

LinkBudget link_budget(double power_w, double bits, double gain, double bandwidth_hz,
                       double noise_w_per_hz) {
  LinkBudget b;
  b.power_w = power_w;
  b.capacity_bps = capacity(power_w, gain, bandwidth_hz, noise_w_per_hz);
  if (b.capacity_bps > 0.0) {
    b.delay_s = bits / b.capacity_bps;
    b.energy_j = power_w * b.delay_s;
  } else {
    b.delay_s = std::numeric_limits<double>::infinity();
  }
  return b;
}

}  // namespace clo
