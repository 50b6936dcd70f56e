#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grassrelay/channels.hpp"
#include "grassrelay/codebooks.hpp"
#include "grassrelay/schemes.hpp"

namespace grassrelay {

enum class SchemeId {
  optimal_no_dl,
  quantized_no_dl,
  optimal_dl,
  modified_unquantized_dl,
  properly_quantized_dl,
  modified_quantized_dl,
  ignore_direct,
  switch_stronger,
  mmse_baseline,
  random_codebook_baseline,
};

std::string_view to_string(SchemeId id);
std::optional<SchemeId> parse_scheme_id(std::string_view name);
const std::vector<SchemeId>& all_scheme_ids();

/// True for schemes that only make sense with a Tx-Rx link.
bool requires_direct(SchemeId id);
/// True for schemes that look up Grassmannian or random codebooks.
bool uses_codebooks(SchemeId id);

/// A scheme plus the codebook size it runs with (quantized schemes only).
struct SchemeSpec {
  SchemeId id = SchemeId::optimal_no_dl;
  int codebook_size = 0;  // N for C0, C1 and C2; 0 when unused

  /// "quantized_no_dl[N=8]" or plain "optimal_no_dl".
  std::string label() const;
  static SchemeSpec parse(std::string_view label);
};

struct FeedbackBudget {
  int n0 = 1;
  int n1 = 1;
  int n2 = 1;
  int b = 0;   // bits per fed-back scalar
  int r0 = 1;  // rank of H0

  void validate() const;
};

/// Feedback bits per coherence interval. Unquantized schemes (ideal CSI)
/// report 0. Throws std::invalid_argument on a codebook size that is not a
/// power of two.
int feedback_bits(SchemeId id, const FeedbackBudget& budget, const SystemDims& dims,
                  bool direct_link);

// ---------------------------------------------------------------------------
// Symbol-level model

/// Scalar view of one interval after the relay and Rx combiners: slot 1
/// direct output h0 x + n0, slot 2 relayed output hr x + nr.
struct EffectiveLink {
  Complex h0{0.0, 0.0};
  double noise0 = 1.0;
  Complex hr{0.0, 0.0};
  double noise_r = 1.0;

  /// |h0|^2/noise0 + |hr|^2/noise_r.
  double combined_snr() const;
};

EffectiveLink effective_link(const ChannelSet& ch, const BeamformingSolution& sol);

/// MRC of the two slot outputs after noise whitening:
/// conj(h0)/noise0 * y0 + conj(hr)/noise_r * y1. Throws on a noise variance
/// that is not positive.
Complex combine_two_slots(Complex y0, Complex y1, const EffectiveLink& link);

/// BPSK symbols and the noise vectors of one coherence interval. Shared by
/// every scheme and SNR point.
struct IntervalNoise {
  std::vector<int> symbols;  // +1 or -1
  ComplexMatrix relay;       // n x symbols, slot 1 at the relay
  ComplexMatrix direct;      // l x symbols, slot 1 at the Rx
  ComplexMatrix rx;          // l x symbols, slot 2 at the Rx
};

IntervalNoise draw_interval_noise(RngStream& rng, const SystemDims& dims, std::size_t symbols);

/// Runs the two-slot transmission of every symbol and returns the combined
/// soft outputs. The relay applies W = relay_scale * relay_tx * relay_rx^H
/// to its received vector; the direct slot is used only when the solution
/// has a direct combiner.
std::vector<Complex> soft_outputs(const ChannelSet& ch, const BeamformingSolution& sol,
                                  const IntervalNoise& noise);

std::uint64_t count_bit_errors(const ChannelSet& ch, const BeamformingSolution& sol,
                               const IntervalNoise& noise);

/// Signal power over noise power of the combined outputs, estimated from
/// the symbols (converges to the solution's gamma_total).
double measured_combined_snr(const ChannelSet& ch, const BeamformingSolution& sol,
                             const IntervalNoise& noise);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepLink { p0, p1, p2 };
std::string_view to_string(SweepLink link);
std::optional<SweepLink> parse_sweep_link(std::string_view name);

/// Codebooks available to a sweep, keyed by (dimension, size). Random
/// baselines cycle through their books: interval i uses book i mod count.
struct CodebookLibrary {
  std::map<std::pair<int, int>, Codebook> grassmannian;
  std::map<std::pair<int, int>, std::vector<Codebook>> random;

  const Codebook& packing(int dim, int size) const;
  const Codebook& random_book(int dim, int size, std::uint64_t interval) const;
};

/// (dimension, size) pairs the schemes need, sorted.
std::vector<std::pair<int, int>> required_codebooks(const std::vector<SchemeSpec>& schemes,
                                                    const SystemDims& dims);
bool needs_random_books(const std::vector<SchemeSpec>& schemes);

struct SimulationConfig {
  SystemDims dims;
  bool direct_link = false;
  double p0_db = 0.0;
  double p1_db = 0.0;
  double p2_db = 0.0;
  SweepLink sweep = SweepLink::p1;
  std::vector<double> grid_db;
  std::uint64_t intervals = 2000;
  std::uint64_t symbols = 100;
  std::uint64_t seed = 1;
  std::vector<SchemeSpec> schemes;
  int feedback_b = 4;
  int mmse_bits = 1;
  AscentOptions ascent;

  /// Throws std::invalid_argument describing the first inconsistency.
  void validate() const;
  LinkGains gains_at(double swept_db) const;
};

struct BerPoint {
  double snr_db = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_sent = 0;
  double ber = 0.0;
  double standard_error = 0.0;  // binomial
};

struct BerCurve {
  SchemeSpec scheme;
  SweepLink sweep = SweepLink::p1;
  std::vector<BerPoint> points;
  int feedback_bits = 0;
  std::string fingerprint;
};

/// Seed, dimensions, schedule, gains and codebook fingerprints folded into a
/// hex digest.
std::string config_fingerprint(const SimulationConfig& config, const CodebookLibrary& books);

/// Monte-Carlo BER with common random numbers: interval i draws its channel
/// from schedule stream 2i and its symbols/noise from stream 2i+1, shared
/// by all schemes and SNR points. Intervals run in parallel; error counts
/// are integer sums, so results do not depend on the thread count.
std::vector<BerCurve> simulate_ber(const SimulationConfig& config, const CodebookLibrary& books);

/// Solution of one scheme on one interval's channels.
BeamformingSolution solve_scheme(const SchemeSpec& scheme, const ChannelSet& ch,
                                 const CodebookLibrary& books, std::uint64_t interval,
                                 int mmse_bits, const AscentOptions& ascent);

void write_ber_csv(std::ostream& out, const std::vector<BerCurve>& curves, std::uint64_t seed);

}  // namespace grassrelay
