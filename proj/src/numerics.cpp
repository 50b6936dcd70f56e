#include "grassrelay/numerics.hpp"

#include <cmath>
#include <cstdio>

namespace grassrelay {

namespace {
constexpr double kPhaseFloor = 1e-12;

// Phase that makes the first significant entry of v real nonnegative.
Complex canonical_rotation(const ComplexVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > kPhaseFloor) return std::conj(v[i]) / mag;
  }
  return Complex(1.0, 0.0);
}

// Rotates by canonical_rotation and pins the leading entry to the real axis
// so that the result is a fixed point.
template <class Column>
Complex apply_canonical_rotation(Column&& v) {
  const Complex rot = canonical_rotation(v);
  v *= rot;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > kPhaseFloor) {
      v[i] = Complex(std::abs(v[i]), 0.0);
      break;
    }
  return rot;
}
}  // namespace

bool all_finite(const ComplexMatrix& h) {
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      if (!std::isfinite(h(i, j).real()) || !std::isfinite(h(i, j).imag()))
        return false;
  return true;
}

Eigen::Index SvdFactors::rank(double rel_tol) const {
  if (singulars.size() == 0 || singulars[0] <= 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < singulars.size(); ++i)
    if (singulars[i] > rel_tol * singulars[0]) ++r;
  return r;
}

ComplexMatrix SvdFactors::reconstruct() const {
  ComplexMatrix sigma = ComplexMatrix::Zero(left.cols(), right.cols());
  for (Eigen::Index i = 0; i < singulars.size(); ++i) sigma(i, i) = singulars[i];
  return left * sigma * right.adjoint();
}

SvdFactors svd(const ComplexMatrix& h) {
  if (h.rows() < 1 || h.cols() < 1) throw NumericError("empty matrix");
  if (!all_finite(h)) throw NumericError("non-finite matrix");

  Eigen::JacobiSVD<ComplexMatrix> solver(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdFactors out{solver.matrixU(), solver.singularValues(), solver.matrixV()};

  const Eigen::Index shared = out.singulars.size();
  for (Eigen::Index i = 0; i < out.right.cols(); ++i) {
    const Complex rot = apply_canonical_rotation(out.right.col(i));
    // Paired columns rotate together so U diag(s) V^H is unchanged.
    if (i < shared) out.left.col(i) *= rot;
  }
  for (Eigen::Index i = shared; i < out.left.cols(); ++i)
    apply_canonical_rotation(out.left.col(i));
  return out;
}

ComplexMatrix sample_complex_gaussian_matrix(RngStream& rng, Eigen::Index rows,
                                             Eigen::Index cols) {
  if (rows < 1 || cols < 1) throw NumericError("matrix dimensions must be >= 1");
  ComplexMatrix h(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) h(i, j) = rng.complex_gaussian();
  return h;
}

ComplexVector sample_unit_vector(RngStream& rng, Eigen::Index dim) {
  ComplexVector v(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.complex_gaussian();
    norm = v.norm();
  } while (norm < 1e-150);
  return v / norm;
}

ComplexMatrix sample_unitary(RngStream& rng, Eigen::Index dim) {
  const ComplexMatrix g = sample_complex_gaussian_matrix(rng, dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

ComplexVector canonical_phase(const ComplexVector& v) {
  if (v.size() == 0 || v.norm() <= kPhaseFloor)
    throw NumericError("canonical_phase: zero vector");
  ComplexVector out = v;
  apply_canonical_rotation(out);
  return out;
}

ComplexVector normalized(const ComplexVector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw NumericError("cannot normalize a zero vector");
  return v / n;
}

double unitarity_error(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols())).norm();
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace grassrelay
