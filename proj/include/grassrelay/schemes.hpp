#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "grassrelay/channels.hpp"
#include "grassrelay/codebooks.hpp"

namespace grassrelay {

/// gamma1 * gamma2 / (1 + gamma1 + gamma2): SNR of an amplify-and-forward
/// hop pair with a power-normalized relay.
double relayed_snr(double gamma1, double gamma2);

struct SnrBreakdown {
  double gamma0 = 0.0;  // direct link
  double gamma1 = 0.0;  // Tx-relay
  double gamma2 = 0.0;  // relay-Rx
  double gamma_relay = 0.0;
  double gamma_total = 0.0;

  static SnrBreakdown from_links(double gamma0, double gamma1, double gamma2);
};

struct FeedbackIndices {
  std::optional<Eigen::Index> tx;     // label in C1
  std::optional<Eigen::Index> relay;  // label in C2
  std::vector<Eigen::Index> direct;   // labels in C0, one per quantized singular vector
};

struct OptimizerReport {
  int starts = 0;
  int iterations = 0;         // summed over starts
  bool converged = true;      // every start met the tolerance before the cap
  double objective = 0.0;     // best objective value reached
};

/// Beamformers for one channel realization and the SNR they achieve.
///
/// Slot 1: Tx sends on `tx`; the relay combines with `relay_rx`, the Rx
/// (when the direct link is used) with `direct_rx`. Slot 2: the relay
/// scales by `relay_scale` and sends on `relay_tx`; the Rx combines with
/// `rx`. The relay matrix is W = relay_scale * relay_tx * relay_rx^H.
struct BeamformingSolution {
  ComplexVector tx;
  ComplexVector relay_rx;
  ComplexVector relay_tx;
  ComplexVector rx;
  std::optional<ComplexVector> direct_rx;
  double relay_scale = 1.0;
  SnrBreakdown snr;
  FeedbackIndices feedback;
  std::optional<OptimizerReport> optimizer;

  ComplexMatrix relay_matrix() const;
  bool uses_direct() const { return direct_rx.has_value(); }
};

/// Completes a solution from the Tx vector s and relay Tx vector g: relay
/// and Rx combiners are matched filters on the true channels and the relay
/// meets its power constraint with equality. The direct slot is included
/// only when `use_direct` and the channel set has H0.
BeamformingSolution assemble_solution(const ChannelSet& ch, const ComplexVector& s,
                                      const ComplexVector& g, bool use_direct);

// ---------------------------------------------------------------------------
// No direct link

/// Strongest right singular vectors on both hops; rank-one relay matrix.
BeamformingSolution optimal_no_direct(const ChannelSet& ch);

struct FixedBeamformerRelay {
  ComplexMatrix relay_matrix;
  double snr = 0.0;
};

/// Best relay matrix for fixed Tx vector s and Rx vector r, and its SNR.
FixedBeamformerRelay snr_for_fixed_beamformers_opt_relay(const ChannelSet& ch,
                                                         const ComplexVector& s,
                                                         const ComplexVector& r);

/// SNR at the Rx for arbitrary (s, W, r) without a direct link, with W used
/// as given (no power normalization).
double relay_snr_general(const ChannelSet& ch, const ComplexVector& s,
                         const ComplexMatrix& w, const ComplexVector& r);

/// P1 |W H1 s|^2 + |W|_F^2.
double relay_power(const ChannelSet& ch, const ComplexVector& s, const ComplexMatrix& w);

BeamformingSolution quantized_no_direct(const ChannelSet& ch, const Codebook& c1,
                                        const Codebook& c2);

// ---------------------------------------------------------------------------
// With direct link

/// f(s) = a/(a + lambda) + mu * s^H B s with a = |H1 s|^2,
/// lambda = (1 + gamma2) / P1 and mu = P0 / gamma2. Multiplying f by gamma2
/// gives the total SNR when B = H0^H H0.
class RelayObjective {
 public:
  RelayObjective(const ComplexMatrix& h1, double p1, ComplexMatrix direct_gram, double p0,
                 double gamma2);

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  double gamma2() const { return gamma2_; }
  const ComplexMatrix& direct_gram() const { return direct_gram_; }
  const ComplexMatrix& relay_gram() const { return relay_gram_; }

  double value(const ComplexVector& s) const;
  // Euclidean gradient with respect to (Re s, Im s), packed as a complex vector.
  ComplexVector gradient(const ComplexVector& s) const;
  double total_snr(const ComplexVector& s) const { return gamma2_ * value(s); }

 private:
  ComplexMatrix relay_gram_;  // H1^H H1
  ComplexMatrix direct_gram_;
  double lambda_;
  double mu_;
  double gamma2_;
};

/// Objective with B = H0^H H0 and the given relay-Rx SNR. Throws
/// std::domain_error when gamma2_star <= 0.
RelayObjective direct_link_objective(const ChannelSet& ch, double gamma2_star);
double direct_link_objective(const ChannelSet& ch, const ComplexVector& s,
                             double gamma2_star);

struct AscentOptions {
  int restarts = -1;  // random starts; negative means max(8, 4m)
  double tol = 1e-10;
  int max_iterations = 500;
  std::uint64_t seed = 0x6A09E667F3BCC909ULL;
};

struct AscentResult {
  ComplexVector s;
  OptimizerReport report;
};

/// Multi-start gradient ascent over the unit sphere using s = u/|u| and an
/// Armijo backtracking line search. Warm starts run first; the best value
/// wins with ties going to the earliest start. The winner is then compared
/// with a golden-section search over the top eigenvectors of
/// cos(t) B + sin(t) H1^H H1, which contains the maximizer; this settles
/// flat ridges where gradient steps stall before the iteration cap.
AscentResult maximize_on_sphere(const RelayObjective& objective,
                                const std::vector<ComplexVector>& warm_starts,
                                RngStream& rng, const AscentOptions& options);

BeamformingSolution optimal_with_direct(const ChannelSet& ch, const AscentOptions& options = {});

/// Same as optimal_with_direct but the Tx vector maximizes the objective
/// with H0^H H0 replaced by nu1^2 e1 e1^H. SNR is evaluated on the true H0.
BeamformingSolution modified_unquantized_with_direct(const ChannelSet& ch,
                                                     const AscentOptions& options = {});

enum class DirectLinkMode { full_h0, quantized_singulars, top_singular_only };

/// What the relay knows about H0.
struct DirectLinkKnowledge {
  DirectLinkMode mode = DirectLinkMode::full_h0;
  RealVector singulars;                  // nu_i, exact
  std::vector<ComplexVector> vectors;    // e_i or their C0 quantizations
  std::vector<Eigen::Index> labels;      // C0 labels (quantized modes)
  ComplexMatrix full_gram;               // H0^H H0 (full_h0 mode)

  ComplexMatrix gram() const;
};

/// Builds the relay's view of H0. Quantized modes map each right singular
/// vector e_i, i < rank(H0) (or only e_1), to its nearest codeword in C0.
DirectLinkKnowledge describe_direct_link(const ComplexMatrix& h0, const Codebook* c0,
                                         DirectLinkMode mode);

BeamformingSolution properly_quantized_with_direct(const ChannelSet& ch, const Codebook& c0,
                                                   const Codebook& c1, const Codebook& c2,
                                                   DirectLinkMode mode);

BeamformingSolution properly_quantized_with_direct(const ChannelSet& ch, const Codebook& c1,
                                                   const Codebook& c2,
                                                   const DirectLinkKnowledge& knowledge);

BeamformingSolution modified_quantized_with_direct(const ChannelSet& ch, const Codebook& c0,
                                                   const Codebook& c1, const Codebook& c2);

// ---------------------------------------------------------------------------
// Baselines

BeamformingSolution baseline_ignore_direct(const ChannelSet& ch);
BeamformingSolution baseline_switch_stronger(const ChannelSet& ch);

/// Reconstruction levels of the MMSE (Lloyd-Max) scalar quantizer for a
/// N(0, 1/2) component with 2^bits levels, ascending. One bit gives
/// +-1/sqrt(pi).
std::vector<double> mmse_component_levels(int bits);

/// Replaces the real and imaginary part of every entry by its MMSE
/// reconstruction.
ComplexMatrix mmse_quantize_matrix(const ComplexMatrix& h, int bits_per_component = 1);

/// Beamformers computed from entrywise-quantized channels; the relay-Rx SNR
/// of the chosen relay vector is fed back exactly. SNR is evaluated on the
/// true channels.
BeamformingSolution baseline_mmse_quantizer(const ChannelSet& ch, int bits_per_component = 1,
                                            const AscentOptions& options = {});

}  // namespace grassrelay
