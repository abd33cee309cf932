#ifndef DPPSUM_TRAINING_HPP
#define DPPSUM_TRAINING_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dppsum/corpus.hpp"
#include "dppsum/dpp.hpp"
#include "dppsum/similarity.hpp"

namespace dppsum {

std::size_t lcs_length(const Tokens& a, const Tokens& b);

// Positions in `b` matched by one longest common subsequence of a and b,
// ascending. Backtracking prefers skipping a token of `a` on ties, so the
// result is deterministic.
std::vector<std::size_t> lcs_matched_positions(const Tokens& a, const Tokens& b);

struct OracleLabel {
  std::string topic_id;
  IndexSet indices;  // selection order
};

inline constexpr std::size_t kDefaultBudgetWords = 100;

// Greedy LCS matching against the references. After each pick the matched
// tokens are removed from every reference independently. Stops on zero gain
// or once the selected word count reaches the budget. Punctuation tokens are
// ignored when matching.
OracleLabel oracle_labels(const Cluster& cluster, std::size_t budget_words = kDefaultBudgetWords);

// One training cluster: raw feature rows, fixed similarity, oracle subset.
struct TrainingInstance {
  std::string topic_id;
  Eigen::MatrixXd features;  // N x F
  SimilarityMatrix similarity;
  IndexSet label;
};

using TrainingSet = std::vector<TrainingInstance>;

// q_i = exp(theta^T x_i) for every row of `features`.
Eigen::VectorXd qualities(const Eigen::MatrixXd& features, const Eigen::VectorXd& theta);

struct LikelihoodReport {
  double value = 0.0;
  std::vector<std::size_t> singular;  // instances whose L_Y-hat is singular
};

LikelihoodReport evaluate_likelihood(const Eigen::VectorXd& theta, const TrainingSet& data);

// Sum over instances of log det(L_Yhat) - log det(L + I). -infinity if any
// label submatrix is singular.
double log_likelihood(const Eigen::VectorXd& theta, const TrainingSet& data);

// 2 * sum_m [ sum_{i in Yhat} x_i - sum_i K_ii x_i ].
Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const TrainingSet& data);

struct QualityModel {
  Eigen::VectorXd theta;
  Eigen::VectorXd feature_means;
  Eigen::VectorXd feature_scales;
  std::string trained_on;

  // Model with theta = 0 and identity standardization.
  static QualityModel neutral(Eigen::Index dim);

  Eigen::MatrixXd standardize(const Eigen::MatrixXd& features) const;
  Eigen::VectorXd quality(const Eigen::MatrixXd& features) const;
};

// Column means and population standard deviations over all rows of all
// instances. Column 0 (bias) and constant columns keep mean 0 / scale 1 and
// mean m / scale 1 respectively.
void fit_standardization(const TrainingSet& data, Eigen::VectorXd& means, Eigen::VectorXd& scales);

std::string fingerprint(const TrainingSet& data);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
};

struct TrainResult {
  QualityModel model;
  // Entry 0 is the likelihood at theta = 0, entry e the likelihood after
  // epoch e (on standardized features).
  std::vector<double> epoch_log_likelihood;
};

// Full-batch gradient ascent from theta = 0. The seed permutes the order in
// which per-cluster gradient terms are accumulated.
TrainResult train_dpp(const TrainingSet& data, const TrainConfig& config);

// Drops label indices whose addition would make S_Yhat singular (exact or
// near duplicates), keeping the first occurrence.
IndexSet prune_singular_label(const SimilarityMatrix& s, const IndexSet& label);

std::string model_to_json(const QualityModel& model);
QualityModel model_from_json(std::string_view text, std::string_view source = "<memory>");
void save_model(const QualityModel& model, const std::filesystem::path& path);
QualityModel load_model(const std::filesystem::path& path);

}  // namespace dppsum

#endif  // DPPSUM_TRAINING_HPP
