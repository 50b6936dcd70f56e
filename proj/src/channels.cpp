#include "grassrelay/channels.hpp"

#include <cmath>
#include <string>

namespace grassrelay {

void SystemDims::validate() const {
  if (m < 1 || n < 1 || l < 1)
    throw std::invalid_argument("antenna counts must be >= 1 (got m=" + std::to_string(m) +
                                ", n=" + std::to_string(n) + ", l=" + std::to_string(l) + ")");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

LinkGains LinkGains::from_db(double p0_db, double p1_db, double p2_db) {
  return {db_to_linear(p0_db), db_to_linear(p1_db), db_to_linear(p2_db)};
}

void LinkGains::validate(bool require_direct) const {
  if (!(p1 > 0.0) || !(p2 > 0.0) || !std::isfinite(p1) || !std::isfinite(p2))
    throw std::invalid_argument("link gains P1, P2 must be finite and > 0");
  if (p0 < 0.0 || !std::isfinite(p0) || (require_direct && !(p0 > 0.0)))
    throw std::invalid_argument("direct link gain P0 must be finite and > 0");
}

const ComplexMatrix& ChannelSet::direct() const {
  if (!h0) throw std::logic_error("channel set has no direct link");
  return *h0;
}

ChannelSet ChannelSet::with_gains(const LinkGains& g) const {
  ChannelSet out = *this;
  out.gains = g;
  return out;
}

ChannelSet sample_channel_set(RngStream& rng, const SystemDims& dims,
                              const LinkGains& gains, bool include_direct) {
  dims.validate();
  ChannelSet ch;
  ch.dims = dims;
  ch.gains = gains;
  ch.h1 = sample_complex_gaussian_matrix(rng, dims.n, dims.m);
  ch.h2 = sample_complex_gaussian_matrix(rng, dims.l, dims.n);
  if (include_direct) ch.h0 = sample_complex_gaussian_matrix(rng, dims.l, dims.m);
  return ch;
}

CoherenceSchedule::CoherenceSchedule(std::uint64_t intervals,
                                     std::uint64_t symbols_per_interval)
    : intervals_(intervals), symbols_(symbols_per_interval) {
  if (intervals < 1 || symbols_per_interval < 1)
    throw std::invalid_argument("schedule needs >= 1 interval and >= 1 symbol");
}

RngStream CoherenceSchedule::channel_stream(std::uint64_t seed,
                                            std::uint64_t interval) const {
  return RngStream(seed, 2 * interval);
}

RngStream CoherenceSchedule::noise_stream(std::uint64_t seed,
                                          std::uint64_t interval) const {
  return RngStream(seed, 2 * interval + 1);
}

}  // namespace grassrelay
