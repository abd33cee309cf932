#include "dppsum/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dppsum/errors.hpp"

namespace dppsum {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPsdTolerance = 1e-8;

void check_subset(std::span<const std::size_t> subset, Eigen::Index n) {
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (std::size_t i : subset) {
    if (i >= static_cast<std::size_t>(n))
      throw ValidationError("index " + std::to_string(i) + " outside ground set of size " + std::to_string(n));
    if (seen[i]) throw ValidationError("index " + std::to_string(i) + " repeated in subset");
    seen[i] = true;
  }
}

std::size_t total_words(std::span<const std::size_t> lengths, std::span<const std::size_t> subset) {
  std::size_t w = 0;
  for (std::size_t i : subset) w += lengths[i];
  return w;
}

void check_lengths(const LEnsemble& l, std::span<const std::size_t> lengths) {
  if (static_cast<Eigen::Index>(lengths.size()) != l.n())
    throw ValidationError("got " + std::to_string(lengths.size()) + " sentence lengths for a ground set of size " +
                          std::to_string(l.n()));
}

}  // namespace

LEnsemble build_l(const Eigen::VectorXd& q, const SimilarityMatrix& s) {
  if (q.size() != s.n())
    throw ValidationError("build_l: " + std::to_string(q.size()) + " qualities for a " + std::to_string(s.n()) +
                          "x" + std::to_string(s.n()) + " similarity matrix");
  for (Eigen::Index i = 0; i < q.size(); ++i)
    if (!(q(i) > 0.0) || !std::isfinite(q(i)))
      throw ValidationError("build_l: quality " + std::to_string(i) + " is not a positive finite number");

  LEnsemble out;
  const Eigen::Index n = q.size();
  out.l_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out.l_(i, j) = q(i) * s(i, j) * q(j);
  out.q_ = q;
  out.s_ = s;

  if (n > 0) {
    const double scale = std::max(1.0, out.l_.diagonal().maxCoeff());
    const double lambda_min = min_eigenvalue(out.l_);
    if (lambda_min < -kPsdTolerance * scale)
      throw NumericalError("build_l: L is not positive semidefinite (min eigenvalue " +
                           std::to_string(lambda_min) + ")");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(out.l_ + Eigen::MatrixXd::Identity(n, n));
  if (llt.info() != Eigen::Success) throw NumericalError("build_l: Cholesky of L + I failed");
  out.log_normalizer_ = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return out;
}

double log_det_psd(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) return kNegInf;
  const Eigen::VectorXd d = ldlt.vectorD();
  const double threshold = kSingularPivot * std::max(m.diagonal().cwiseAbs().maxCoeff(), 0.0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > threshold)) return kNegInf;
    acc += std::log(d(i));
  }
  return acc;
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, std::span<const std::size_t> indices) {
  const auto k = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      sub(a, b) = m(static_cast<Eigen::Index>(indices[a]), static_cast<Eigen::Index>(indices[b]));
  return sub;
}

double subset_log_det(const LEnsemble& l, std::span<const std::size_t> subset) {
  return log_det_psd(principal_submatrix(l.matrix(), subset));
}

double log_prob(std::span<const std::size_t> subset, const LEnsemble& l) {
  check_subset(subset, l.n());
  return subset_log_det(l, subset) - l.log_normalizer();
}

Eigen::MatrixXd marginal_kernel(const LEnsemble& l) {
  if (l.n() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l.matrix());
  if (solver.info() != Eigen::Success) throw NumericalError("marginal_kernel: eigendecomposition failed");
  const Eigen::VectorXd lambda = solver.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd ratio = lambda.array() / (1.0 + lambda.array());
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::MatrixXd k = v * ratio.asDiagonal() * v.transpose();
  return 0.5 * (k + k.transpose());
}

std::vector<std::size_t> word_counts(std::span<const Sentence> sentences) {
  std::vector<std::size_t> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.tokens.size());
  return out;
}

SummarySelection greedy_map(const LEnsemble& l, std::span<const std::size_t> lengths, std::size_t budget_words) {
  check_lengths(l, lengths);
  if (budget_words < 1) throw ValidationError("greedy_map: budget must be at least 1 word");

  const auto n = static_cast<std::size_t>(l.n());
  SummarySelection sel;
  std::vector<bool> chosen(n, false);
  double current = 0.0;  // log det of the empty set

  while (true) {
    std::size_t best = n;
    double best_score = kNegInf;
    sel.indices.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i] || sel.word_count + lengths[i] > budget_words) continue;
      sel.indices.back() = i;
      const double score = subset_log_det(l, sel.indices);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    sel.indices.pop_back();
    if (best == n || !(best_score > current)) break;
    sel.indices.push_back(best);
    chosen[best] = true;
    sel.word_count += lengths[best];
    current = best_score;
  }
  sel.log_prob = current - l.log_normalizer();
  return sel;
}

SummarySelection greedy_map(const LEnsemble& l, std::span<const Sentence> sentences, std::size_t budget_words) {
  const auto lengths = word_counts(sentences);
  return greedy_map(l, std::span<const std::size_t>(lengths), budget_words);
}

ExhaustiveResult exhaustive_map(const LEnsemble& l, std::span<const std::size_t> lengths, std::size_t budget_words) {
  check_lengths(l, lengths);
  if (l.n() > kExhaustiveLimit)
    throw ValidationError("exhaustive_map: ground set of size " + std::to_string(l.n()) +
                          " exceeds the limit of " + std::to_string(kExhaustiveLimit));
  const auto n = static_cast<std::size_t>(l.n());
  const std::uint64_t total = std::uint64_t{1} << n;

  ExhaustiveResult out;
  double best = 0.0;  // empty set
  IndexSet subset;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    ++out.subsets_examined;
    subset.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) subset.push_back(i);
    if (subset.empty() || total_words(lengths, subset) > budget_words) continue;
    const double score = subset_log_det(l, subset);
    if (score > best) {
      best = score;
      out.selection.indices = subset;
    }
  }
  out.selection.word_count = total_words(lengths, out.selection.indices);
  out.selection.log_prob = best - l.log_normalizer();
  return out;
}

ExhaustiveResult exhaustive_map(const LEnsemble& l, std::span<const Sentence> sentences, std::size_t budget_words) {
  const auto lengths = word_counts(sentences);
  return exhaustive_map(l, std::span<const std::size_t>(lengths), budget_words);
}

}  // namespace dppsum
