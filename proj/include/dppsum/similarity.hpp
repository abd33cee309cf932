#ifndef DPPSUM_SIMILARITY_HPP
#define DPPSUM_SIMILARITY_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dppsum/features.hpp"

namespace dppsum {

// Symmetric n x n matrix with unit diagonal and entries in [0, 1]. The
// invariants are checked on construction and cannot be broken afterwards.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  // Throws ValidationError unless `values` already satisfies the invariants.
  explicit SimilarityMatrix(Eigen::MatrixXd values);

  // Symmetrizes ((M + M^T) / 2), clamps to [0, 1] and resets the diagonal.
  // Throws ValidationError on non-square or non-finite input.
  static SimilarityMatrix repaired(const Eigen::MatrixXd& raw);
  static SimilarityMatrix identity(Eigen::Index n);

  Eigen::Index n() const { return values_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const Eigen::MatrixXd& values() const { return values_; }

  bool operator==(const SimilarityMatrix& other) const { return values_ == other.values_; }

 private:
  Eigen::MatrixXd values_;
};

// Returns a description of the first broken invariant, or an empty string.
std::string check_similarity_invariants(const Eigen::MatrixXd& values);

SimilarityMatrix cosine_matrix(const std::vector<TfIdfVector>& vectors);

// (1 - lambda_c) * cos + lambda_c * caps, symmetrized, unit diagonal.
SimilarityMatrix combine(const SimilarityMatrix& cos, const SimilarityMatrix& caps, double lambda_c);

inline constexpr double kPsdEps = 1e-8;

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

// Nearest-correlation style repair: clip negative eigenvalues, rescale by
// D^{-1/2} M D^{-1/2} back to a unit diagonal, clamp to [0, 1]; repeated
// until the minimum eigenvalue is >= -eps. Inputs that are already PSD within
// eps (and valid similarity matrices) are returned unchanged.
SimilarityMatrix project_psd(const Eigen::MatrixXd& symmetric, double eps = kPsdEps);
SimilarityMatrix project_psd(const SimilarityMatrix& s, double eps = kPsdEps);

// Writes `<base>.csv` and `<base>.pgm` for the top-left min(n, max_n) block.
struct HeatmapPaths {
  std::filesystem::path csv;
  std::filesystem::path pgm;
};
HeatmapPaths emit_heatmap(const SimilarityMatrix& s, const std::filesystem::path& base, Eigen::Index max_n);

// Similarity text format: "n=<N> topic=<topic_id>" then N rows of N decimals.
struct SimilarityFile {
  std::string topic_id;
  SimilarityMatrix matrix;
};

SimilarityFile parse_similarity_file(std::string_view text, std::string_view source = "<memory>");
SimilarityFile read_similarity_file(const std::filesystem::path& path);
std::string format_similarity_file(const SimilarityMatrix& s, std::string_view topic_id);
void write_similarity_file(const SimilarityMatrix& s, std::string_view topic_id,
                           const std::filesystem::path& path);

// Writes via a temporary sibling file and rename.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

}  // namespace dppsum

#endif  // DPPSUM_SIMILARITY_HPP
