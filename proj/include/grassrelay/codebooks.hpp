#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "grassrelay/numerics.hpp"

namespace grassrelay {

enum class CodebookKind { grassmannian, random, external };

std::string_view to_string(CodebookKind kind);

class CodebookError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chordal distance sqrt(1 - |w1^H w2|^2) between the lines spanned by two
/// unit vectors. Throws NumericError if either norm is off by more than 1e-6.
double chordal_distance(const ComplexVector& w1, const ComplexVector& w2);

/// An immutable set of N unit vectors in C^dim, stored as the columns of a
/// dim x N matrix, with the minimum pairwise chordal distance cached.
///
/// Construction rejects vectors whose norm is off by more than 1e-6 (they
/// are renormalized to 1e-10 otherwise) and pairs of codewords closer than
/// 1e-8 as lines.
class Codebook {
 public:
  Codebook(ComplexMatrix vectors, CodebookKind kind);

  Eigen::Index dim() const { return vectors_.rows(); }
  Eigen::Index size() const { return vectors_.cols(); }
  const ComplexMatrix& vectors() const { return vectors_; }
  ComplexVector vector(Eigen::Index i) const { return vectors_.col(i); }
  double min_distance() const { return min_distance_; }
  CodebookKind kind() const { return kind_; }

  // FNV-1a over the 17-digit text form; stable across runs and platforms.
  std::string fingerprint() const;

 private:
  ComplexMatrix vectors_;
  double min_distance_ = 1.0;
  CodebookKind kind_;
};

/// Minimum chordal distance over all distinct pairs of columns. Needs >= 2
/// columns.
double min_distance(const ComplexMatrix& vectors);
double min_distance(const Codebook& codebook);

struct GrassmannianOptions {
  int restarts = 16;
  int iterations = 400;
};

/// Max-min distance line packing by multi-start refinement of a log-sum-exp
/// surrogate of the largest pairwise coherence |w_i^H w_j|^2 under a
/// decreasing temperature. The result is the best packing seen, including the
/// random starting points themselves.
Codebook generate_grassmannian(RngStream& rng, int dim, int size,
                               const GrassmannianOptions& options = {});

Codebook generate_random_codebook(RngStream& rng, int dim, int size);

struct CodewordMatch {
  Eigen::Index index = 0;
  ComplexVector vector;
  double value = 0.0;  // distance for nearest_codeword, SNR for best_codeword_by_gain
};

/// Codeword closest to s in chordal distance. Ties go to the lowest index.
CodewordMatch nearest_codeword(const Codebook& codebook, const ComplexVector& s);

/// Codeword maximizing gain * |H w|^2. Ties go to the lowest index.
CodewordMatch best_codeword_by_gain(const Codebook& codebook, const ComplexMatrix& h,
                                    double gain);

// Text format: "m N" header, then N rows of 2m floats "re1 im1 re2 im2 ...".
// Lines starting with '#' are comments.
std::string format_codebook(const Codebook& codebook);
Codebook parse_codebook(std::string_view text, const std::string& source = "<string>");
void save_codebook(const Codebook& codebook, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace grassrelay
