#ifndef DPPSUM_FEATURES_HPP
#define DPPSUM_FEATURES_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dppsum/corpus.hpp"

namespace dppsum {

// Smoothed inverse document frequency: idf(t) = ln((1 + D) / (1 + df(t))) + 1.
class IdfTable {
 public:
  IdfTable() = default;
  IdfTable(std::map<std::string, std::size_t> document_frequency, std::size_t document_count);

  double idf(const std::string& term) const;
  std::size_t document_count() const { return document_count_; }
  std::size_t document_frequency(const std::string& term) const;
  const std::map<std::string, double>& weights() const { return weights_; }

 private:
  std::map<std::string, std::size_t> df_;
  std::map<std::string, double> weights_;
  std::size_t document_count_ = 0;
};

// Sparse term -> weight map. Ordered so iteration (and hence summation) is
// deterministic.
using TfIdfVector = std::map<std::string, double>;

inline constexpr std::size_t kFeatureDim = 4;
using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;

// Feature slots: [bias, length, position, centroid cosine].
inline constexpr std::size_t kLengthCap = 50;

IdfTable build_idf(const Cluster& cluster);

// count(t) * idf(t), L2-normalized. Empty token list gives an empty vector.
TfIdfVector tfidf(const Tokens& tokens, const IdfTable& idf);
TfIdfVector tfidf(const Sentence& sentence, const IdfTable& idf);

double dot(const TfIdfVector& a, const TfIdfVector& b);
double norm(const TfIdfVector& v);

// L2-normalized mean of the given vectors (zero vector if the mean is zero).
TfIdfVector normalized_centroid(const std::vector<TfIdfVector>& vectors);

FeatureVector quality_features(const Sentence& sentence, const Cluster& cluster, const IdfTable& idf);

// All sentence vectors and the N x F feature matrix of a cluster, computed
// once.
struct ClusterFeatures {
  IdfTable idf;
  std::vector<TfIdfVector> vectors;
  Eigen::MatrixXd features;  // row i is x_i
};

ClusterFeatures compute_cluster_features(const Cluster& cluster);

}  // namespace dppsum

#endif  // DPPSUM_FEATURES_HPP
