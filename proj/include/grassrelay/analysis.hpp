#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "grassrelay/channels.hpp"
#include "grassrelay/codebooks.hpp"
#include "grassrelay/schemes.hpp"

namespace grassrelay {

// Packing terms of the loss bounds: N (delta/2)^{2(m-1)} times (1 - delta/2)
// or times (1 - delta^2/4). The single-hop bound uses the second form; the
// relay bounds use the first.
double packing_term(int m, double n_codewords, double delta);
double packing_term_single_hop(int m, double n_codewords, double delta);

/// Upper bound on E{d_C(s)} for s uniform on the unit sphere of C^m.
double distortion_bound(int m, double n_codewords, double delta);

double bound_single_hop(double p, int m, double n_codewords, double delta,
                        double mean_sigma1_sq);

double bound_no_direct(double p1, double p2, int m, int n, int l, double n1, double delta1,
                       double n2, double delta2);

double bound_with_direct_full(double p0, double p1, double p2, int m, int n, int l, double n1,
                              double delta1, double n2, double delta2);

double bound_with_direct_quantized(double p0, double p1, double p2, int m, int n, int l,
                                   double n0, double delta0, double n1, double delta1,
                                   double n2, double delta2);

struct BoundReport {
  double empirical_loss = 0.0;
  double bound_value = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  bool satisfied = false;
};

/// Mean and standard error of paired per-realization losses checked against
/// `bound`: satisfied iff mean <= bound + 3 * stderr.
BoundReport make_bound_report(std::span<const double> losses, double bound);

struct SampleSummary {
  double mean = 0.0;
  double standard_error = 0.0;
};
SampleSummary summarize(std::span<const double> values);

// Monte-Carlo loss experiments. Realization i uses RngStream(seed, i), so the
// same seed pairs the optimal and quantized schemes on identical channels.

BoundReport single_hop_loss(std::uint64_t seed, std::size_t samples, int rows, const Codebook& c,
                            double p);

BoundReport no_direct_loss(std::uint64_t seed, std::size_t samples, const SystemDims& dims,
                           const LinkGains& gains, const Codebook& c1, const Codebook& c2);

BoundReport direct_full_loss(std::uint64_t seed, std::size_t samples, const SystemDims& dims,
                             const LinkGains& gains, const Codebook& c1, const Codebook& c2,
                             const AscentOptions& options = {});

BoundReport direct_quantized_loss(std::uint64_t seed, std::size_t samples,
                                  const SystemDims& dims, const LinkGains& gains,
                                  const Codebook& c0, const Codebook& c1, const Codebook& c2,
                                  const AscentOptions& options = {});

// Inequalities used in the loss-bound proofs, evaluated on concrete inputs.
// Each returns true when the inequality holds (with a 1e-12 relative slack
// for rounding).

/// |x1 y1/(1+x1+y1) - x2 y2/(1+x2+y2)| <= |x1-x2| + |y1-y2| for x, y >= 0.
bool lemma1_check(double x1, double x2, double y1, double y2);
/// |a/(a+c) - b/(b+c)| <= |a-b|/c for a, b >= 0, c > 0.
bool ratio_difference_check(double a, double b, double c);
/// | |u^H v|^2 - |v^H w|^2 | <= 2 d(u, w) for unit u, v, w.
bool overlap_difference_check(const ComplexVector& u, const ComplexVector& v,
                              const ComplexVector& w);
/// | |H s|^2 - |H s_C|^2 | <= 2 (sum sigma_i^2) d_C(s).
bool lemma3_check(const ComplexMatrix& h, const ComplexVector& s, const Codebook& c);
/// sigma1^2 |v1^H s|^2 <= |H s|^2 <= sigma1^2 |v1^H s|^2 + sigma2^2.
bool lemma6_check(const ComplexMatrix& h, const ComplexVector& s);

/// Relay-matrix subproblem for fixed (s, r) after the unitary change of
/// variables: |y^H diag(sigma) x|^2 / (|diag(sigma) y|^2 + 1).
double fixed_relay_snr(const ComplexVector& x, const RealVector& sigma, const ComplexVector& y);
/// c1^2 c2^2 / (1 + c1^2 + c2^2) with c1 = |x|, c2 = |y|.
double fixed_relay_snr_bound(double c1, double c2);

/// Largest SNR over `draws` random feasible (s, W, r) without a direct link:
/// unit s and r, W scaled so the relay power is exactly 1. Even draws use a
/// Gaussian W, odd draws a rank-one W.
double best_random_feasible_snr(const ChannelSet& ch, RngStream& rng, std::size_t draws);

struct GapEstimate {
  double gap_db = 0.0;
  RealVector mean_singular_sq;  // E{nu_i^2}, i = 1..min(rows, cols)
};

/// 10 log10(1 + E{nu2^2}/E{nu1^2}) for rows x cols CN(0,1) matrices.
/// Throws when min(rows, cols) < 2.
GapEstimate appendix3_gap(std::uint64_t seed, int rows, int cols, std::size_t samples);

/// Same formula on caller-supplied matrices.
GapEstimate singular_power_gap(std::span<const ComplexMatrix> matrices);

// Goodness of fit.

/// CDF of Beta(1, k): 1 - (1 - x)^k.
double beta1_cdf(double x, double k);

/// Two-sided one-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic p-value of the KS statistic with Stephens' small-sample
/// correction.
double ks_pvalue(double statistic, std::size_t n);

}  // namespace grassrelay
