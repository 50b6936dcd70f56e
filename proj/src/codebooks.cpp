#include "grassrelay/codebooks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace grassrelay {

namespace {

constexpr double kUnitTolerance = 1e-6;
constexpr double kDuplicateLine = 1e-8;

void require_unit(const ComplexVector& w, const char* what) {
  if (std::abs(w.norm() - 1.0) > kUnitTolerance)
    throw NumericError(std::string(what) + " is not unit norm");
}

double distance_from_overlap(double overlap_sq) {
  return std::sqrt(std::clamp(1.0 - overlap_sq, 0.0, 1.0));
}

// Largest |w_i^H w_j|^2 over i < j.
double max_coherence(const ComplexMatrix& w) {
  const ComplexMatrix gram = w.adjoint() * w;
  double worst = 0.0;
  for (Eigen::Index j = 1; j < gram.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) worst = std::max(worst, std::norm(gram(i, j)));
  return worst;
}

ComplexMatrix random_columns(RngStream& rng, int dim, int size) {
  ComplexMatrix w(dim, size);
  for (int i = 0; i < size; ++i) w.col(i) = sample_unit_vector(rng, dim);
  return w;
}

// Projected gradient of the soft-max coherence at the given temperature,
// scaled so the largest column step has unit length. Empty when stationary.
ComplexMatrix softmax_direction(const ComplexMatrix& w, double temperature,
                                Eigen::MatrixXd& weights) {
  const Eigen::Index size = w.cols();
  const ComplexMatrix gram = w.adjoint() * w;
  double peak = 0.0;
  for (Eigen::Index j = 1; j < size; ++j)
    for (Eigen::Index i = 0; i < j; ++i) peak = std::max(peak, std::norm(gram(i, j)));
  double total = 0.0;
  for (Eigen::Index j = 0; j < size; ++j) {
    weights(j, j) = 0.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double p = std::exp((std::norm(gram(i, j)) - peak) / temperature);
      weights(i, j) = weights(j, i) = p;
      total += p;
    }
  }
  weights /= total;

  // d/dw_i^* of |w_i^H w_j|^2 is w_j (w_j^H w_i).
  ComplexMatrix grad = w * (weights.cast<Complex>().cwiseProduct(gram));
  for (Eigen::Index i = 0; i < size; ++i) {
    const Complex radial = w.col(i).dot(grad.col(i));
    grad.col(i) -= radial * w.col(i);
  }
  const double scale = grad.colwise().norm().maxCoeff();
  if (!(scale > 0.0)) return {};
  return grad / scale;
}

ComplexMatrix step_on_sphere(const ComplexMatrix& w, const ComplexMatrix& direction,
                             double step) {
  ComplexMatrix out = w - step * direction;
  for (Eigen::Index i = 0; i < out.cols(); ++i) out.col(i).normalize();
  return out;
}

// Annealed descent on the soft-max coherence followed by a backtracking
// polish on the true max coherence. Returns the best packing visited.
ComplexMatrix refine_packing(ComplexMatrix w, int iterations) {
  constexpr double t_start = 0.05;
  constexpr double t_end = 2e-5;
  constexpr double t_polish = 1e-7;
  ComplexMatrix best = w;
  double best_coherence = max_coherence(w);
  Eigen::MatrixXd weights(w.cols(), w.cols());

  for (int it = 0; it < iterations; ++it) {
    const double frac = iterations > 1 ? double(it) / double(iterations - 1) : 1.0;
    const double temperature = t_start * std::pow(t_end / t_start, frac);
    const double step = 0.5 * std::sqrt(temperature / t_start) + 0.02 * (1.0 - frac);
    const ComplexMatrix direction = softmax_direction(w, temperature, weights);
    if (direction.size() == 0) break;
    w = step_on_sphere(w, direction, step);
    const double coherence = max_coherence(w);
    if (coherence < best_coherence) {
      best_coherence = coherence;
      best = w;
    }
  }

  double step = 1e-2;
  for (int it = 0; it < iterations && step > 1e-12; ++it) {
    const ComplexMatrix direction = softmax_direction(best, t_polish, weights);
    if (direction.size() == 0) break;
    const ComplexMatrix trial = step_on_sphere(best, direction, step);
    const double coherence = max_coherence(trial);
    if (coherence < best_coherence) {
      best_coherence = coherence;
      best = trial;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return best;
}

}  // namespace

// Header and codeword rows without the kind comment.
std::string format_rows(const Codebook& codebook);

std::string_view to_string(CodebookKind kind) {
  switch (kind) {
    case CodebookKind::grassmannian: return "grassmannian";
    case CodebookKind::random: return "random";
    case CodebookKind::external: return "external";
  }
  return "unknown";
}

double chordal_distance(const ComplexVector& w1, const ComplexVector& w2) {
  if (w1.size() != w2.size()) throw NumericError("chordal_distance: dimension mismatch");
  require_unit(w1, "chordal_distance: first argument");
  require_unit(w2, "chordal_distance: second argument");
  return distance_from_overlap(std::norm(w1.dot(w2)));
}

double min_distance(const ComplexMatrix& vectors) {
  if (vectors.cols() < 2) throw CodebookError("min_distance needs at least 2 codewords");
  return distance_from_overlap(max_coherence(vectors));
}

double min_distance(const Codebook& codebook) { return min_distance(codebook.vectors()); }

Codebook::Codebook(ComplexMatrix vectors, CodebookKind kind)
    : vectors_(std::move(vectors)), kind_(kind) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1)
    throw CodebookError("codebook must have dim >= 1 and at least one codeword");
  if (!all_finite(vectors_)) throw CodebookError("codebook has non-finite entries");
  for (Eigen::Index i = 0; i < vectors_.cols(); ++i) {
    const double norm = vectors_.col(i).norm();
    if (std::abs(norm - 1.0) > kUnitTolerance)
      throw CodebookError("codeword " + std::to_string(i) + " is not unit norm (|w| = " +
                          std::to_string(norm) + ")");
    vectors_.col(i) /= norm;
  }
  if (vectors_.cols() >= 2) {
    min_distance_ = grassrelay::min_distance(vectors_);
    if (min_distance_ < kDuplicateLine)
      throw CodebookError("codebook contains duplicate lines (min distance " +
                          std::to_string(min_distance_) + ")");
  }
}

std::string Codebook::fingerprint() const {
  return hex64(fnv1a(format_rows(*this)));
}

Codebook generate_grassmannian(RngStream& rng, int dim, int size,
                               const GrassmannianOptions& options) {
  if (dim < 2 || size < 2) throw CodebookError("generate_grassmannian needs dim >= 2, N >= 2");
  if (size == 2) {
    // Any orthonormal pair is optimal.
    ComplexMatrix w = ComplexMatrix::Zero(dim, 2);
    w(0, 0) = 1.0;
    w(1, 1) = 1.0;
    return Codebook(w, CodebookKind::grassmannian);
  }
  ComplexMatrix best;
  double best_coherence = std::numeric_limits<double>::infinity();
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    ComplexMatrix start = random_columns(rng, dim, size);
    ComplexMatrix candidate = refine_packing(start, options.iterations);
    for (const ComplexMatrix* w : {&start, &candidate}) {
      const double c = max_coherence(*w);
      if (c < best_coherence) {
        best_coherence = c;
        best = *w;
      }
    }
  }
  for (Eigen::Index i = 0; i < best.cols(); ++i) best.col(i) = canonical_phase(best.col(i));
  return Codebook(best, CodebookKind::grassmannian);
}

Codebook generate_random_codebook(RngStream& rng, int dim, int size) {
  if (dim < 1 || size < 1) throw CodebookError("random codebook needs dim >= 1, N >= 1");
  return Codebook(random_columns(rng, dim, size), CodebookKind::random);
}

CodewordMatch nearest_codeword(const Codebook& codebook, const ComplexVector& s) {
  if (s.size() != codebook.dim())
    throw CodebookError("nearest_codeword: vector dimension " + std::to_string(s.size()) +
                        " does not match codebook dimension " +
                        std::to_string(codebook.dim()));
  const Eigen::VectorXd overlap = (codebook.vectors().adjoint() * s).cwiseAbs2();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < overlap.size(); ++i)
    if (overlap[i] > overlap[best]) best = i;
  return {best, codebook.vector(best), distance_from_overlap(overlap[best] / s.squaredNorm())};
}

CodewordMatch best_codeword_by_gain(const Codebook& codebook, const ComplexMatrix& h,
                                    double gain) {
  if (h.cols() != codebook.dim())
    throw CodebookError("best_codeword_by_gain: channel has " + std::to_string(h.cols()) +
                        " columns but codebook dimension is " +
                        std::to_string(codebook.dim()));
  const Eigen::VectorXd power = (h * codebook.vectors()).colwise().squaredNorm().transpose();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < power.size(); ++i)
    if (power[i] > power[best]) best = i;
  return {best, codebook.vector(best), gain * power[best]};
}

std::string format_rows(const Codebook& codebook) {
  std::ostringstream out;
  out << codebook.dim() << ' ' << codebook.size() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < codebook.size(); ++i) {
    for (Eigen::Index k = 0; k < codebook.dim(); ++k) {
      const Complex z = codebook.vectors()(k, i);
      out << (k ? " " : "") << z.real() << ' ' << z.imag();
    }
    out << '\n';
  }
  return out.str();
}

std::string format_codebook(const Codebook& codebook) {
  return "# kind: " + std::string(to_string(codebook.kind())) + "\n" + format_rows(codebook);
}

Codebook parse_codebook(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  long dim = -1;
  long count = -1;
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
  auto fail = [&](const std::string& msg) -> CodebookError {
    return CodebookError(source + ":" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    if (dim < 0) {
      std::string extra;
      if (!(fields >> dim >> count) || (fields >> extra))
        throw fail("expected header 'm N'");
      if (dim < 1 || count < 1) throw fail("header values must be >= 1");
      continue;
    }
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw fail("not a number: '" + token + "'");
      }
    }
    if (static_cast<long>(values.size()) != 2 * dim)
      throw fail("expected " + std::to_string(2 * dim) + " values, found " +
                 std::to_string(values.size()));
    if (static_cast<long>(rows.size()) == count)
      throw fail("more than the declared " + std::to_string(count) + " codewords");
    rows.push_back(std::move(values));
    row_lines.push_back(line_no);
  }
  if (dim < 0) throw CodebookError(source + ": missing header 'm N'");
  if (static_cast<long>(rows.size()) != count)
    throw CodebookError(source + ": declared " + std::to_string(count) + " codewords, found " +
                        std::to_string(rows.size()));

  ComplexMatrix w(dim, count);
  for (long i = 0; i < count; ++i) {
    for (long k = 0; k < dim; ++k) w(k, i) = Complex(rows[i][2 * k], rows[i][2 * k + 1]);
    const double norm = w.col(i).norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitTolerance) {
      line_no = row_lines[i];
      std::ostringstream msg;
      msg << "codeword row " << i + 1 << " is not unit norm (|w| = " << std::setprecision(10)
          << norm << ")";
      throw fail(msg.str());
    }
  }
  try {
    return Codebook(std::move(w), CodebookKind::external);
  } catch (const CodebookError& e) {
    throw CodebookError(source + ": " + e.what());
  }
}

void save_codebook(const Codebook& codebook, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw CodebookError("cannot open " + path.string() + " for writing");
  out << format_codebook(codebook);
  if (!out) throw CodebookError("failed writing " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CodebookError("cannot open codebook file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_codebook(buffer.str(), path.string());
}

}  // namespace grassrelay
