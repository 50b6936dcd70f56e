#include "grassrelay/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "grassrelay/parallel.hpp"

namespace grassrelay {

namespace {

void check_packing_args(int m, double n_codewords, double delta) {
  if (m < 2) throw std::domain_error("loss bounds need dimension > 1 (got " + std::to_string(m) + ")");
  if (!(n_codewords >= 2.0)) throw std::domain_error("loss bounds need N >= 2");
  if (!(delta > 0.0) || delta > 1.0) throw std::domain_error("minimum distance must be in (0, 1]");
}

void check_gain(double p, const char* name) {
  if (!(p >= 0.0) || !std::isfinite(p))
    throw std::domain_error(std::string(name) + " must be finite and >= 0");
}

bool le_with_slack(double lhs, double rhs) {
  return lhs <= rhs + 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

template <class F>
std::vector<double> per_realization(std::size_t samples, F&& loss) {
  std::vector<double> out(samples);
  parallel_for(samples, [&](std::size_t i) { out[i] = loss(i); });
  return out;
}

}  // namespace

double packing_term(int m, double n_codewords, double delta) {
  return n_codewords * std::pow(delta / 2.0, 2.0 * (m - 1)) * (1.0 - delta / 2.0);
}

double packing_term_single_hop(int m, double n_codewords, double delta) {
  return n_codewords * std::pow(delta / 2.0, 2.0 * (m - 1)) * (1.0 - delta * delta / 4.0);
}

double distortion_bound(int m, double n_codewords, double delta) {
  check_packing_args(m, n_codewords, delta);
  return 1.0 - packing_term(m, n_codewords, delta);
}

double bound_single_hop(double p, int m, double n_codewords, double delta,
                        double mean_sigma1_sq) {
  check_packing_args(m, n_codewords, delta);
  check_gain(p, "P");
  return p * mean_sigma1_sq * (1.0 - packing_term_single_hop(m, n_codewords, delta));
}

double bound_no_direct(double p1, double p2, int m, int n, int l, double n1, double delta1,
                       double n2, double delta2) {
  check_packing_args(m, n1, delta1);
  check_packing_args(n, n2, delta2);
  check_gain(p1, "P1");
  check_gain(p2, "P2");
  return 2.0 * m * n * p1 * (1.0 - packing_term(m, n1, delta1)) +
         2.0 * n * l * p2 * (1.0 - packing_term(n, n2, delta2));
}

double bound_with_direct_full(double p0, double p1, double p2, int m, int n, int l, double n1,
                              double delta1, double n2, double delta2) {
  check_packing_args(m, n1, delta1);
  check_packing_args(n, n2, delta2);
  check_gain(p0, "P0");
  check_gain(p1, "P1");
  check_gain(p2, "P2");
  return 2.0 * (m * l * p0 + m * n * p1) * (1.0 - packing_term(m, n1, delta1)) +
         2.0 * n * l * p2 * (1.0 - packing_term(n, n2, delta2));
}

double bound_with_direct_quantized(double p0, double p1, double p2, int m, int n, int l,
                                   double n0, double delta0, double n1, double delta1,
                                   double n2, double delta2) {
  check_packing_args(m, n0, delta0);
  return bound_with_direct_full(p0, p1, p2, m, n, l, n1, delta1, n2, delta2) +
         4.0 * m * l * p0 * (1.0 - packing_term(m, n0, delta0));
}

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    s.standard_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return s;
}

BoundReport make_bound_report(std::span<const double> losses, double bound) {
  const SampleSummary s = summarize(losses);
  BoundReport r;
  r.empirical_loss = s.mean;
  r.standard_error = s.standard_error;
  r.bound_value = bound;
  r.samples = losses.size();
  r.satisfied = r.empirical_loss <= r.bound_value + 3.0 * r.standard_error;
  return r;
}

BoundReport single_hop_loss(std::uint64_t seed, std::size_t samples, int rows, const Codebook& c,
                            double p) {
  const int m = static_cast<int>(c.dim());
  std::vector<double> sigma1_sq(samples);
  const std::vector<double> losses = per_realization(samples, [&](std::size_t i) {
    RngStream rng(seed, i);
    const ComplexMatrix h = sample_complex_gaussian_matrix(rng, rows, m);
    const double top = svd(h).singulars[0];
    sigma1_sq[i] = top * top;
    return p * sigma1_sq[i] - best_codeword_by_gain(c, h, p).value;
  });
  const double mean_sigma1_sq = summarize(sigma1_sq).mean;
  return make_bound_report(losses, bound_single_hop(p, m, static_cast<double>(c.size()),
                                                    c.min_distance(), mean_sigma1_sq));
}

BoundReport no_direct_loss(std::uint64_t seed, std::size_t samples, const SystemDims& dims,
                           const LinkGains& gains, const Codebook& c1, const Codebook& c2) {
  const std::vector<double> losses = per_realization(samples, [&](std::size_t i) {
    RngStream rng(seed, i);
    const ChannelSet ch = sample_channel_set(rng, dims, gains, false);
    return optimal_no_direct(ch).snr.gamma_total - quantized_no_direct(ch, c1, c2).snr.gamma_total;
  });
  return make_bound_report(
      losses, bound_no_direct(gains.p1, gains.p2, dims.m, dims.n, dims.l,
                              static_cast<double>(c1.size()), c1.min_distance(),
                              static_cast<double>(c2.size()), c2.min_distance()));
}

BoundReport direct_full_loss(std::uint64_t seed, std::size_t samples, const SystemDims& dims,
                             const LinkGains& gains, const Codebook& c1, const Codebook& c2,
                             const AscentOptions& options) {
  const std::vector<double> losses = per_realization(samples, [&](std::size_t i) {
    RngStream rng(seed, i);
    const ChannelSet ch = sample_channel_set(rng, dims, gains, true);
    const DirectLinkKnowledge full = describe_direct_link(ch.direct(), nullptr, DirectLinkMode::full_h0);
    return optimal_with_direct(ch, options).snr.gamma_total -
           properly_quantized_with_direct(ch, c1, c2, full).snr.gamma_total;
  });
  return make_bound_report(
      losses, bound_with_direct_full(gains.p0, gains.p1, gains.p2, dims.m, dims.n, dims.l,
                                     static_cast<double>(c1.size()), c1.min_distance(),
                                     static_cast<double>(c2.size()), c2.min_distance()));
}

BoundReport direct_quantized_loss(std::uint64_t seed, std::size_t samples,
                                  const SystemDims& dims, const LinkGains& gains,
                                  const Codebook& c0, const Codebook& c1, const Codebook& c2,
                                  const AscentOptions& options) {
  const std::vector<double> losses = per_realization(samples, [&](std::size_t i) {
    RngStream rng(seed, i);
    const ChannelSet ch = sample_channel_set(rng, dims, gains, true);
    return optimal_with_direct(ch, options).snr.gamma_total -
           properly_quantized_with_direct(ch, c0, c1, c2, DirectLinkMode::quantized_singulars)
               .snr.gamma_total;
  });
  return make_bound_report(
      losses, bound_with_direct_quantized(gains.p0, gains.p1, gains.p2, dims.m, dims.n, dims.l,
                                          static_cast<double>(c0.size()), c0.min_distance(),
                                          static_cast<double>(c1.size()), c1.min_distance(),
                                          static_cast<double>(c2.size()), c2.min_distance()));
}

bool lemma1_check(double x1, double x2, double y1, double y2) {
  if (x1 < 0 || x2 < 0 || y1 < 0 || y2 < 0) throw std::domain_error("lemma1_check: inputs must be >= 0");
  const double lhs = std::abs(relayed_snr(x1, y1) - relayed_snr(x2, y2));
  return le_with_slack(lhs, std::abs(x1 - x2) + std::abs(y1 - y2));
}

bool ratio_difference_check(double a, double b, double c) {
  if (a < 0 || b < 0 || !(c > 0)) throw std::domain_error("ratio_difference_check: need a, b >= 0, c > 0");
  return le_with_slack(std::abs(a / (a + c) - b / (b + c)), std::abs(a - b) / c);
}

bool overlap_difference_check(const ComplexVector& u, const ComplexVector& v,
                              const ComplexVector& w) {
  const double lhs = std::abs(std::norm(u.dot(v)) - std::norm(v.dot(w)));
  return le_with_slack(lhs, 2.0 * chordal_distance(u, w));
}

bool lemma3_check(const ComplexMatrix& h, const ComplexVector& s, const Codebook& c) {
  const CodewordMatch nearest = nearest_codeword(c, s);
  const double lhs = std::abs((h * s).squaredNorm() - (h * nearest.vector).squaredNorm());
  return le_with_slack(lhs, 2.0 * h.squaredNorm() * nearest.value);
}

bool lemma6_check(const ComplexMatrix& h, const ComplexVector& s) {
  const SvdFactors f = svd(h);
  const double top = f.singulars[0] * f.singulars[0] * std::norm(f.right.col(0).dot(s));
  const double second = f.singulars.size() > 1 ? f.singulars[1] * f.singulars[1] : 0.0;
  const double gain = (h * s).squaredNorm();
  return le_with_slack(top, gain) && le_with_slack(gain, top + second);
}

double fixed_relay_snr(const ComplexVector& x, const RealVector& sigma, const ComplexVector& y) {
  const ComplexVector sx = sigma.cast<Complex>().cwiseProduct(x);
  const ComplexVector sy = sigma.cast<Complex>().cwiseProduct(y);
  return std::norm(y.dot(sx)) / (sy.squaredNorm() + 1.0);
}

double fixed_relay_snr_bound(double c1, double c2) {
  return relayed_snr(c1 * c1, c2 * c2);
}

double best_random_feasible_snr(const ChannelSet& ch, RngStream& rng, std::size_t draws) {
  const Eigen::Index m = ch.h1.cols(), n = ch.h1.rows(), l = ch.h2.rows();
  double best = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const ComplexVector s = sample_unit_vector(rng, m);
    const ComplexVector r = sample_unit_vector(rng, l);
    ComplexMatrix w = d % 2 == 0 ? sample_complex_gaussian_matrix(rng, n, n)
                                 : ComplexMatrix(sample_unit_vector(rng, n) *
                                                 sample_unit_vector(rng, n).adjoint());
    w /= std::sqrt(relay_power(ch, s, w));
    best = std::max(best, relay_snr_general(ch, s, w, r));
  }
  return best;
}

GapEstimate singular_power_gap(std::span<const ComplexMatrix> matrices) {
  if (matrices.empty()) throw std::invalid_argument("singular_power_gap: no matrices");
  const Eigen::Index r = std::min(matrices.front().rows(), matrices.front().cols());
  if (r < 2) throw std::domain_error("gap needs min(rows, cols) >= 2 (no second singular value)");
  GapEstimate out;
  out.mean_singular_sq = RealVector::Zero(r);
  for (const ComplexMatrix& h : matrices) out.mean_singular_sq += svd(h).singulars.cwiseAbs2();
  out.mean_singular_sq /= static_cast<double>(matrices.size());
  out.gap_db = 10.0 * std::log10(1.0 + out.mean_singular_sq[1] / out.mean_singular_sq[0]);
  return out;
}

GapEstimate appendix3_gap(std::uint64_t seed, int rows, int cols, std::size_t samples) {
  if (std::min(rows, cols) < 2)
    throw std::domain_error("gap needs min(rows, cols) >= 2 (no second singular value)");
  if (samples < 1) throw std::invalid_argument("appendix3_gap: samples must be >= 1");
  std::vector<ComplexMatrix> mats(samples);
  parallel_for(samples, [&](std::size_t i) {
    RngStream rng(seed, i);
    mats[i] = sample_complex_gaussian_matrix(rng, rows, cols);
  });
  return singular_power_gap(mats);
}

double beta1_cdf(double x, double k) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - x, k);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t n) {
  const double root_n = std::sqrt(static_cast<double>(n));
  const double lambda = (root_n + 0.12 + 0.11 / root_n) * statistic;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace grassrelay
