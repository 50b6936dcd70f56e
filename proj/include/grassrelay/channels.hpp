#pragma once

#include <cstdint>
#include <optional>

#include "grassrelay/numerics.hpp"

namespace grassrelay {

// Antenna counts at the transmitter, relay and receiver.
struct SystemDims {
  int m = 2;
  int n = 2;
  int l = 2;

  void validate() const;
  bool operator==(const SystemDims&) const = default;
};

double db_to_linear(double db);
double linear_to_db(double linear);

// Link SNRs as linear power ratios: direct (p0), Tx-relay (p1), relay-Rx (p2).
struct LinkGains {
  double p0 = 0.0;
  double p1 = 1.0;
  double p2 = 1.0;

  static LinkGains from_db(double p0_db, double p1_db, double p2_db);
  // p0 may be zero when the direct link is absent; p1 and p2 must be > 0.
  void validate(bool require_direct) const;
};

struct ChannelSet {
  std::optional<ComplexMatrix> h0;  // l x m, direct
  ComplexMatrix h1;                 // n x m, Tx-relay
  ComplexMatrix h2;                 // l x n, relay-Rx
  LinkGains gains;
  SystemDims dims;

  bool has_direct() const { return h0.has_value(); }
  const ComplexMatrix& direct() const;
  ChannelSet with_gains(const LinkGains& g) const;
};

// Draws H1, H2 (and H0 when include_direct) with i.i.d. CN(0,1) entries.
// H1 and H2 are always drawn first so the relay channels of a stream do not
// depend on include_direct.
ChannelSet sample_channel_set(RngStream& rng, const SystemDims& dims,
                              const LinkGains& gains, bool include_direct);

// Maps coherence intervals to RNG streams. Channels are constant within an
// interval and independent across intervals.
class CoherenceSchedule {
 public:
  CoherenceSchedule(std::uint64_t intervals, std::uint64_t symbols_per_interval);

  std::uint64_t intervals() const { return intervals_; }
  std::uint64_t symbols_per_interval() const { return symbols_; }
  std::uint64_t total_symbols() const { return intervals_ * symbols_; }

  RngStream channel_stream(std::uint64_t seed, std::uint64_t interval) const;
  RngStream noise_stream(std::uint64_t seed, std::uint64_t interval) const;

 private:
  std::uint64_t intervals_;
  std::uint64_t symbols_;
};

}  // namespace grassrelay
