#ifndef DPPSUM_DPP_HPP
#define DPPSUM_DPP_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dppsum/corpus.hpp"
#include "dppsum/similarity.hpp"

namespace dppsum {

using IndexSet = std::vector<std::size_t>;

// L-ensemble with the quality/similarity decomposition L_ij = q_i S_ij q_j.
class LEnsemble {
 public:
  Eigen::Index n() const { return l_.rows(); }
  const Eigen::MatrixXd& matrix() const { return l_; }
  const Eigen::VectorXd& quality() const { return q_; }
  const SimilarityMatrix& similarity() const { return s_; }
  // log det(L + I), computed once at construction.
  double log_normalizer() const { return log_normalizer_; }

 private:
  friend LEnsemble build_l(const Eigen::VectorXd& q, const SimilarityMatrix& s);
  Eigen::MatrixXd l_;
  Eigen::VectorXd q_;
  SimilarityMatrix s_;
  double log_normalizer_ = 0.0;
};

// Throws ValidationError for size mismatch or q_i <= 0 (or non-finite), and
// NumericalError if L fails the PSD check (relative tolerance 1e-8).
LEnsemble build_l(const Eigen::VectorXd& q, const SimilarityMatrix& s);

// log det of a symmetric PSD matrix via pivoted LDL^T. Returns -infinity when
// a pivot falls below kSingularPivot times the largest diagonal entry. The
// empty matrix has log det 0.
inline constexpr double kSingularPivot = 1e-12;
double log_det_psd(const Eigen::MatrixXd& m);

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, std::span<const std::size_t> indices);

// log det(L_Y); -infinity for singular L_Y.
double subset_log_det(const LEnsemble& l, std::span<const std::size_t> subset);

// log P(Y; L) = log det(L_Y) - log det(L + I). Throws ValidationError for
// out-of-range or repeated indices.
double log_prob(std::span<const std::size_t> subset, const LEnsemble& l);

// K = L (L + I)^{-1}, from the eigendecomposition of L.
Eigen::MatrixXd marginal_kernel(const LEnsemble& l);

struct SummarySelection {
  IndexSet indices;  // in selection order
  std::size_t word_count = 0;
  double log_prob = 0.0;
};

std::vector<std::size_t> word_counts(std::span<const Sentence> sentences);

// Greedy MAP under a word budget. Each step adds the feasible candidate with
// the largest det(L_{Y+i}); candidates that would overflow the budget are
// skipped. Stops when nothing fits or no candidate strictly increases
// det(L_Y). Ties go to the lower id.
SummarySelection greedy_map(const LEnsemble& l, std::span<const std::size_t> lengths, std::size_t budget_words);
SummarySelection greedy_map(const LEnsemble& l, std::span<const Sentence> sentences, std::size_t budget_words);

inline constexpr Eigen::Index kExhaustiveLimit = 20;

struct ExhaustiveResult {
  SummarySelection selection;  // indices ascending
  std::uint64_t subsets_examined = 0;
};

// Enumerates every subset and returns the feasible one with the largest
// det(L_Y). The empty set wins ties. Refuses n > 20.
ExhaustiveResult exhaustive_map(const LEnsemble& l, std::span<const std::size_t> lengths, std::size_t budget_words);
ExhaustiveResult exhaustive_map(const LEnsemble& l, std::span<const Sentence> sentences, std::size_t budget_words);

}  // namespace dppsum

#endif  // DPPSUM_DPP_HPP
