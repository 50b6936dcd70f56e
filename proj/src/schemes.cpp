#include "grassrelay/schemes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace grassrelay {

namespace {

// Matched filter direction for y; the first basis vector when y is zero.
ComplexVector matched(const ComplexVector& y) {
  const double n = y.norm();
  if (n > 0.0) return y / n;
  ComplexVector e = ComplexVector::Zero(y.size());
  e[0] = 1.0;
  return e;
}

std::uint64_t hash_matrix(std::uint64_t h, const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      h = mix64(h ^ std::bit_cast<std::uint64_t>(m(i, j).real()));
      h = mix64(h ^ std::bit_cast<std::uint64_t>(m(i, j).imag()));
    }
  return h;
}

// Random starts are a pure function of the channel realization.
RngStream solver_stream(const ChannelSet& ch, const AscentOptions& options) {
  std::uint64_t h = hash_matrix(0x243F6A8885A308D3ULL, ch.h1);
  if (ch.h0) h = hash_matrix(h, *ch.h0);
  return RngStream(options.seed, h);
}

int restart_count(const AscentOptions& options, Eigen::Index dim) {
  if (options.restarts >= 0) return options.restarts;
  return std::max<int>(8, 4 * static_cast<int>(dim));
}

double quadratic_form(const ComplexMatrix& gram, const ComplexVector& s) {
  return s.dot(gram * s).real();
}

// Index of the largest value; ties keep the lowest index.
template <class F>
Eigen::Index argmax_codeword(const Codebook& book, F&& score) {
  Eigen::Index best = 0;
  double best_value = score(book.vectors().col(0));
  for (Eigen::Index i = 1; i < book.size(); ++i) {
    const double v = score(book.vectors().col(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

void require_dims(const ChannelSet& ch, const Codebook& c1, const Codebook& c2) {
  if (c1.dim() != ch.h1.cols())
    throw CodebookError("C1 dimension " + std::to_string(c1.dim()) +
                        " does not match Tx antennas " + std::to_string(ch.h1.cols()));
  if (c2.dim() != ch.h2.cols())
    throw CodebookError("C2 dimension " + std::to_string(c2.dim()) +
                        " does not match relay antennas " + std::to_string(ch.h2.cols()));
}

// The pair (s^H A s, s^H B s) ranges over a convex set and the objective is
// concave and increasing in both, so the maximizer is a top eigenvector of
// cos(t) B + sin(t) A for some t in [0, pi/2], and the objective is unimodal
// along that family. Golden-section search over t polishes the ascent result
// on flat ridges where gradient steps crawl.
struct BoundaryPoint {
  ComplexVector s;
  double value = -std::numeric_limits<double>::infinity();
};

BoundaryPoint refine_on_boundary(const RelayObjective& objective) {
  BoundaryPoint best;
  const double a_norm = objective.relay_gram().norm();
  const double b_norm = objective.direct_gram().norm() * objective.mu();
  if (!(a_norm > 0.0) || !(b_norm > 0.0)) return best;
  const ComplexMatrix a = objective.relay_gram() / a_norm;
  const ComplexMatrix b = objective.direct_gram() / objective.direct_gram().norm();
  auto at = [&](double t) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(std::cos(t) * b + std::sin(t) * a);
    ComplexVector s = eig.eigenvectors().col(eig.eigenvectors().cols() - 1);
    const double v = objective.value(s);
    if (v > best.value) {
      best.value = v;
      best.s = s;
    }
    return v;
  };
  constexpr double kGolden = 0.6180339887498949;
  double lo = 0.0, hi = std::numbers::pi / 2;
  at(lo);
  at(hi);
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = at(x1), f2 = at(x2);
  for (int it = 0; it < 90 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = at(x1);
    }
  }
  return best;
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double relayed_snr(double gamma1, double gamma2) {
  return gamma1 * gamma2 / (1.0 + gamma1 + gamma2);
}

SnrBreakdown SnrBreakdown::from_links(double gamma0, double gamma1, double gamma2) {
  SnrBreakdown out{gamma0, gamma1, gamma2, relayed_snr(gamma1, gamma2), 0.0};
  out.gamma_total = out.gamma_relay + gamma0;
  return out;
}

ComplexMatrix BeamformingSolution::relay_matrix() const {
  return relay_scale * relay_tx * relay_rx.adjoint();
}

BeamformingSolution assemble_solution(const ChannelSet& ch, const ComplexVector& s,
                                      const ComplexVector& g, bool use_direct) {
  BeamformingSolution sol;
  sol.tx = s;
  sol.relay_tx = g;
  const ComplexVector h1s = ch.h1 * s;
  const ComplexVector h2g = ch.h2 * g;
  sol.relay_rx = matched(h1s);
  sol.rx = matched(h2g);
  const double gamma1 = ch.gains.p1 * h1s.squaredNorm();
  const double gamma2 = ch.gains.p2 * h2g.squaredNorm();
  double gamma0 = 0.0;
  if (use_direct && ch.h0) {
    const ComplexVector h0s = *ch.h0 * s;
    sol.direct_rx = matched(h0s);
    gamma0 = ch.gains.p0 * h0s.squaredNorm();
  }
  sol.relay_scale = 1.0 / std::sqrt(1.0 + gamma1);
  sol.snr = SnrBreakdown::from_links(gamma0, gamma1, gamma2);
  return sol;
}

BeamformingSolution optimal_no_direct(const ChannelSet& ch) {
  const SvdFactors f1 = svd(ch.h1);
  const SvdFactors f2 = svd(ch.h2);
  return assemble_solution(ch, f1.right.col(0), f2.right.col(0), false);
}

FixedBeamformerRelay snr_for_fixed_beamformers_opt_relay(const ChannelSet& ch,
                                                         const ComplexVector& s,
                                                         const ComplexVector& r) {
  const ComplexVector h1 = std::sqrt(ch.gains.p1) * (ch.h1 * s);
  const ComplexVector h2 = std::sqrt(ch.gains.p2) * (ch.h2.adjoint() * r);
  const double c1 = h1.squaredNorm();
  const double c2 = h2.squaredNorm();
  FixedBeamformerRelay out;
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    out.relay_matrix = ComplexMatrix::Zero(ch.h1.rows(), ch.h1.rows());
    out.snr = 0.0;
    return out;
  }
  const double sigma = 1.0 / std::sqrt(1.0 + c1);
  out.relay_matrix = sigma * (h2 / std::sqrt(c2)) * (h1 / std::sqrt(c1)).adjoint();
  out.snr = c1 * c2 / (1.0 + c1 + c2);
  return out;
}

double relay_snr_general(const ChannelSet& ch, const ComplexVector& s, const ComplexMatrix& w,
                         const ComplexVector& r) {
  const Complex signal = r.dot(ch.h2 * (w * (ch.h1 * s)));
  const double noise =
      ch.gains.p2 * (w.adjoint() * (ch.h2.adjoint() * r)).squaredNorm() + r.squaredNorm();
  return ch.gains.p1 * ch.gains.p2 * std::norm(signal) / noise;
}

double relay_power(const ChannelSet& ch, const ComplexVector& s, const ComplexMatrix& w) {
  return ch.gains.p1 * (w * (ch.h1 * s)).squaredNorm() + w.squaredNorm();
}

BeamformingSolution quantized_no_direct(const ChannelSet& ch, const Codebook& c1,
                                        const Codebook& c2) {
  require_dims(ch, c1, c2);
  const CodewordMatch tx = best_codeword_by_gain(c1, ch.h1, ch.gains.p1);
  const CodewordMatch relay = best_codeword_by_gain(c2, ch.h2, ch.gains.p2);
  BeamformingSolution sol = assemble_solution(ch, tx.vector, relay.vector, false);
  sol.feedback.tx = tx.index;
  sol.feedback.relay = relay.index;
  return sol;
}

// ---------------------------------------------------------------------------

RelayObjective::RelayObjective(const ComplexMatrix& h1, double p1, ComplexMatrix direct_gram,
                               double p0, double gamma2)
    : relay_gram_(h1.adjoint() * h1), direct_gram_(std::move(direct_gram)), gamma2_(gamma2) {
  if (!(gamma2 > 0.0))
    throw std::domain_error("relay-Rx SNR must be > 0 to form the direct-link objective");
  if (!(p1 > 0.0)) throw std::domain_error("Tx-relay gain must be > 0");
  if (direct_gram_.rows() != relay_gram_.rows() || direct_gram_.cols() != relay_gram_.cols())
    throw std::invalid_argument("direct-link Gram matrix has the wrong shape");
  lambda_ = (1.0 + gamma2) / p1;
  mu_ = p0 / gamma2;
}

double RelayObjective::value(const ComplexVector& s) const {
  const double a = quadratic_form(relay_gram_, s);
  return a / (a + lambda_) + mu_ * quadratic_form(direct_gram_, s);
}

ComplexVector RelayObjective::gradient(const ComplexVector& s) const {
  const double a = quadratic_form(relay_gram_, s);
  const double d = a + lambda_;
  return 2.0 * ((lambda_ / (d * d)) * (relay_gram_ * s) + mu_ * (direct_gram_ * s));
}

RelayObjective direct_link_objective(const ChannelSet& ch, double gamma2_star) {
  const ComplexMatrix& h0 = ch.direct();
  return RelayObjective(ch.h1, ch.gains.p1, h0.adjoint() * h0, ch.gains.p0, gamma2_star);
}

double direct_link_objective(const ChannelSet& ch, const ComplexVector& s,
                             double gamma2_star) {
  return direct_link_objective(ch, gamma2_star).value(s);
}

AscentResult maximize_on_sphere(const RelayObjective& objective,
                                const std::vector<ComplexVector>& warm_starts, RngStream& rng,
                                const AscentOptions& options) {
  const Eigen::Index dim = objective.direct_gram().rows();
  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;
  // Curvature scale of the objective, used to size the first trial step.
  const double curvature =
      2.0 * (objective.direct_gram().norm() * objective.mu() +
             objective.relay_gram().norm() / objective.lambda()) +
      1e-12;
  const double first_step = 1.0 / curvature;

  AscentResult best;
  best.report.objective = -std::numeric_limits<double>::infinity();
  best.report.converged = true;

  auto climb = [&](ComplexVector u) {
    u.normalize();
    double f = objective.value(u);
    double step = first_step;
    bool converged = false;
    int it = 0;
    while (it < options.max_iterations) {
      ++it;
      ComplexVector g = objective.gradient(u);
      g -= u.dot(g).real() * u;
      const double slope = g.squaredNorm();
      if (slope < 1e-28) {
        converged = true;
        break;
      }
      step *= 4.0;
      ComplexVector trial;
      double f_trial = f;
      while (true) {
        trial = (u + step * g).normalized();
        f_trial = objective.value(trial);
        if (f_trial >= f + kArmijo * step * slope) break;
        step *= kShrink;
        if (step < 1e-300) break;
      }
      if (!(f_trial > f)) {
        converged = true;
        break;
      }
      const double improvement = f_trial - f;
      u = trial;
      f = f_trial;
      if (improvement < options.tol) {
        converged = true;
        break;
      }
    }
    best.report.starts += 1;
    best.report.iterations += it;
    best.report.converged = best.report.converged && converged;
    if (f > best.report.objective) {
      best.report.objective = f;
      best.s = u;
    }
  };

  for (const ComplexVector& start : warm_starts) climb(start);
  const int restarts = restart_count(options, dim);
  for (int r = 0; r < restarts; ++r) climb(sample_unit_vector(rng, dim));
  if (best.report.starts == 0) throw std::invalid_argument("maximize_on_sphere: no starts");
  const BoundaryPoint polished = refine_on_boundary(objective);
  if (polished.value > best.report.objective) {
    best.report.objective = polished.value;
    best.s = polished.s;
  }
  best.s = canonical_phase(best.s);
  return best;
}

namespace {

// Tx vector maximizing the objective built from `direct_gram`; falls back to
// the top eigenvector of the direct term when gamma2 is zero.
BeamformingSolution solve_with_direct_gram(const ChannelSet& ch, const ComplexMatrix& direct_gram,
                                           const ComplexVector& direct_top,
                                           const AscentOptions& options) {
  const SvdFactors f1 = svd(ch.h1);
  const SvdFactors f2 = svd(ch.h2);
  const ComplexVector g1 = f2.right.col(0);
  const double gamma2 = ch.gains.p2 * f2.singulars[0] * f2.singulars[0];
  if (!(gamma2 > 0.0) || !(ch.gains.p1 > 0.0))
    return assemble_solution(ch, canonical_phase(direct_top), g1, true);

  const RelayObjective objective(ch.h1, ch.gains.p1, direct_gram, ch.gains.p0, gamma2);
  RngStream rng = solver_stream(ch, options);
  const AscentResult result =
      maximize_on_sphere(objective, {f1.right.col(0), direct_top}, rng, options);
  BeamformingSolution sol = assemble_solution(ch, result.s, g1, true);
  sol.optimizer = result.report;
  return sol;
}

}  // namespace

BeamformingSolution optimal_with_direct(const ChannelSet& ch, const AscentOptions& options) {
  const ComplexMatrix& h0 = ch.direct();
  const SvdFactors f0 = svd(h0);
  return solve_with_direct_gram(ch, h0.adjoint() * h0, f0.right.col(0), options);
}

BeamformingSolution modified_unquantized_with_direct(const ChannelSet& ch,
                                                     const AscentOptions& options) {
  const SvdFactors f0 = svd(ch.direct());
  const ComplexVector e1 = f0.right.col(0);
  const double nu1 = f0.singulars[0];
  return solve_with_direct_gram(ch, nu1 * nu1 * e1 * e1.adjoint(), e1, options);
}

ComplexMatrix DirectLinkKnowledge::gram() const {
  if (mode == DirectLinkMode::full_h0) return full_gram;
  if (vectors.empty()) throw std::logic_error("direct-link knowledge has no vectors");
  const Eigen::Index dim = vectors.front().size();
  ComplexMatrix b = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < vectors.size(); ++i)
    b += singulars[static_cast<Eigen::Index>(i)] * singulars[static_cast<Eigen::Index>(i)] *
         vectors[i] * vectors[i].adjoint();
  return b;
}

DirectLinkKnowledge describe_direct_link(const ComplexMatrix& h0, const Codebook* c0,
                                         DirectLinkMode mode) {
  DirectLinkKnowledge k;
  k.mode = mode;
  const SvdFactors f0 = svd(h0);
  if (mode == DirectLinkMode::full_h0) {
    k.full_gram = h0.adjoint() * h0;
    k.singulars = f0.singulars;
    for (Eigen::Index i = 0; i < f0.singulars.size(); ++i) k.vectors.push_back(f0.right.col(i));
    return k;
  }
  if (c0 == nullptr) throw std::invalid_argument("quantized direct-link modes need C0");
  if (c0->dim() != h0.cols())
    throw CodebookError("C0 dimension " + std::to_string(c0->dim()) +
                        " does not match Tx antennas " + std::to_string(h0.cols()));
  const Eigen::Index count =
      mode == DirectLinkMode::top_singular_only ? 1 : std::max<Eigen::Index>(1, f0.rank());
  k.singulars = f0.singulars.head(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const CodewordMatch q = nearest_codeword(*c0, f0.right.col(i));
    k.vectors.push_back(q.vector);
    k.labels.push_back(q.index);
  }
  return k;
}

BeamformingSolution properly_quantized_with_direct(const ChannelSet& ch, const Codebook& c1,
                                                   const Codebook& c2,
                                                   const DirectLinkKnowledge& knowledge) {
  require_dims(ch, c1, c2);
  ch.direct();
  const CodewordMatch relay = best_codeword_by_gain(c2, ch.h2, ch.gains.p2);
  const ComplexMatrix b = knowledge.gram();
  if (b.rows() != c1.dim()) throw CodebookError("direct-link knowledge dimension mismatch");

  Eigen::Index tx = 0;
  if (relay.value > 0.0 && ch.gains.p1 > 0.0) {
    const RelayObjective objective(ch.h1, ch.gains.p1, b, ch.gains.p0, relay.value);
    tx = argmax_codeword(c1, [&](const ComplexVector& w) { return objective.value(w); });
  } else {
    tx = argmax_codeword(c1, [&](const ComplexVector& w) { return quadratic_form(b, w); });
  }
  BeamformingSolution sol = assemble_solution(ch, c1.vector(tx), relay.vector, true);
  sol.feedback.tx = tx;
  sol.feedback.relay = relay.index;
  sol.feedback.direct = knowledge.labels;
  return sol;
}

BeamformingSolution properly_quantized_with_direct(const ChannelSet& ch, const Codebook& c0,
                                                   const Codebook& c1, const Codebook& c2,
                                                   DirectLinkMode mode) {
  return properly_quantized_with_direct(ch, c1, c2, describe_direct_link(ch.direct(), &c0, mode));
}

BeamformingSolution modified_quantized_with_direct(const ChannelSet& ch, const Codebook& c0,
                                                   const Codebook& c1, const Codebook& c2) {
  return properly_quantized_with_direct(
      ch, c1, c2, describe_direct_link(ch.direct(), &c0, DirectLinkMode::top_singular_only));
}

// ---------------------------------------------------------------------------

BeamformingSolution baseline_ignore_direct(const ChannelSet& ch) {
  const SvdFactors f1 = svd(ch.h1);
  const SvdFactors f2 = svd(ch.h2);
  return assemble_solution(ch, f1.right.col(0), f2.right.col(0), ch.has_direct());
}

BeamformingSolution baseline_switch_stronger(const ChannelSet& ch) {
  const SvdFactors f0 = svd(ch.direct());
  const SvdFactors f1 = svd(ch.h1);
  const SvdFactors f2 = svd(ch.h2);
  const double gamma1 = ch.gains.p1 * f1.singulars[0] * f1.singulars[0];
  const double gamma2 = ch.gains.p2 * f2.singulars[0] * f2.singulars[0];
  const double direct = ch.gains.p0 * f0.singulars[0] * f0.singulars[0];
  const ComplexVector s = relayed_snr(gamma1, gamma2) > direct ? f1.right.col(0)
                                                               : f0.right.col(0);
  return assemble_solution(ch, s, f2.right.col(0), true);
}

std::vector<double> mmse_component_levels(int bits) {
  if (bits < 1 || bits > 8) throw std::invalid_argument("bits per component must be in [1, 8]");
  const double sigma = std::sqrt(0.5);
  const int count = 1 << bits;
  std::vector<double> levels(count);
  for (int k = 0; k < count; ++k) levels[k] = sigma * 3.0 * ((k + 0.5) / count * 2.0 - 1.0);
  // Lloyd-Max iteration: thresholds at midpoints, levels at conditional means.
  for (int iter = 0; iter < 10000; ++iter) {
    double shift = 0.0;
    for (int k = 0; k < count; ++k) {
      const double lo = k == 0 ? -INFINITY : 0.5 * (levels[k - 1] + levels[k]) / sigma;
      const double hi = k == count - 1 ? INFINITY : 0.5 * (levels[k] + levels[k + 1]) / sigma;
      const double mass = std_normal_cdf(hi) - std_normal_cdf(lo);
      const double pdf_lo = std::isinf(lo) ? 0.0 : std_normal_pdf(lo);
      const double pdf_hi = std::isinf(hi) ? 0.0 : std_normal_pdf(hi);
      const double centroid = sigma * (pdf_lo - pdf_hi) / mass;
      shift = std::max(shift, std::abs(centroid - levels[k]));
      levels[k] = centroid;
    }
    if (shift < 1e-15) break;
  }
  return levels;
}

ComplexMatrix mmse_quantize_matrix(const ComplexMatrix& h, int bits_per_component) {
  const std::vector<double> levels = mmse_component_levels(bits_per_component);
  auto quantize = [&](double x) {
    std::size_t k = 0;
    while (k + 1 < levels.size() && x > 0.5 * (levels[k] + levels[k + 1])) ++k;
    return levels[k];
  };
  ComplexMatrix out(h.rows(), h.cols());
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      out(i, j) = Complex(quantize(h(i, j).real()), quantize(h(i, j).imag()));
  return out;
}

BeamformingSolution baseline_mmse_quantizer(const ChannelSet& ch, int bits_per_component,
                                            const AscentOptions& options) {
  ChannelSet fed_back = ch;
  fed_back.h1 = mmse_quantize_matrix(ch.h1, bits_per_component);
  fed_back.h2 = mmse_quantize_matrix(ch.h2, bits_per_component);
  const ComplexVector g = svd(fed_back.h2).right.col(0);
  if (!ch.has_direct()) {
    const ComplexVector s = svd(fed_back.h1).right.col(0);
    return assemble_solution(ch, s, g, false);
  }
  fed_back.h0 = mmse_quantize_matrix(*ch.h0, bits_per_component);
  // The Rx knows H2, so the SNR of the chosen relay vector is exact.
  const double gamma2 = ch.gains.p2 * (ch.h2 * g).squaredNorm();
  const SvdFactors f0 = svd(*fed_back.h0);
  ComplexVector s;
  if (gamma2 > 0.0 && ch.gains.p1 > 0.0) {
    const RelayObjective objective(fed_back.h1, ch.gains.p1, fed_back.h0->adjoint() * *fed_back.h0,
                                   ch.gains.p0, gamma2);
    RngStream rng = solver_stream(fed_back, options);
    s = maximize_on_sphere(objective, {svd(fed_back.h1).right.col(0), f0.right.col(0)}, rng,
                           options)
            .s;
  } else {
    s = canonical_phase(f0.right.col(0));
  }
  return assemble_solution(ch, s, g, true);
}

}  // namespace grassrelay
