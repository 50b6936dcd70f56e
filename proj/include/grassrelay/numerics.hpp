#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <stdexcept>

#include "grassrelay/rng.hpp"

namespace grassrelay {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

class NumericError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Full singular value decomposition H = left * diag(singulars) * right^H.
///
/// `left` is p x p and `right` is q x q, both unitary, so null-space
/// directions are available. `singulars` has min(p, q) entries sorted
/// nonincreasing. Each singular pair (left_i, right_i) is phase-fixed so
/// that right_i is canonical (see canonical_phase).
struct SvdFactors {
  ComplexMatrix left;
  RealVector singulars;
  ComplexMatrix right;

  Eigen::Index rank(double rel_tol = 1e-12) const;
  ComplexMatrix reconstruct() const;
};

/// Throws NumericError("non-finite matrix") on NaN/Inf entries.
SvdFactors svd(const ComplexMatrix& h);

bool all_finite(const ComplexMatrix& h);

ComplexMatrix sample_complex_gaussian_matrix(RngStream& rng, Eigen::Index rows,
                                             Eigen::Index cols);

/// Uniformly distributed point on the unit sphere of C^dim.
ComplexVector sample_unit_vector(RngStream& rng, Eigen::Index dim);

/// Haar-distributed unitary matrix (QR of a Gaussian matrix with the
/// diagonal phase of R removed).
ComplexMatrix sample_unitary(RngStream& rng, Eigen::Index dim);

/// Rotates v so its first entry with modulus > 1e-12 is real and
/// nonnegative. Throws on a zero vector.
ComplexVector canonical_phase(const ComplexVector& v);

/// v / |v|, throwing NumericError if |v| is zero.
ComplexVector normalized(const ComplexVector& v);

/// Frobenius distance of U^H U from the identity.
double unitarity_error(const ComplexMatrix& u);

/// 64-bit FNV-1a; `basis` chains hashes of several pieces.
std::uint64_t fnv1a(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

}  // namespace grassrelay
