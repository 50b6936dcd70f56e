#pragma once

#include <complex>
#include <cstdint>
#include <limits>

namespace grassrelay {

// Counter-based random stream. Draw k of stream (seed, id) is a pure
// function of (seed, id, k), so results never depend on how work is split
// across threads.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();
  double standard_normal();
  // CN(0, 1): real and imaginary parts independent N(0, 1/2).
  std::complex<double> complex_gaussian();

  // A child stream, independent of this one and of siblings with other tags.
  RngStream fork(std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace grassrelay
