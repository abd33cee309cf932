#include "dppsum/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dppsum/errors.hpp"

namespace dppsum {
namespace {

double idf_value(std::size_t df, std::size_t doc_count) {
  return std::log((1.0 + static_cast<double>(doc_count)) / (1.0 + static_cast<double>(df))) + 1.0;
}

void normalize(TfIdfVector& v) {
  const double n = norm(v);
  if (n <= 0.0) {
    v.clear();
    return;
  }
  for (auto& [term, w] : v) w /= n;
}

FeatureVector features_with_centroid(const Sentence& sentence, const TfIdfVector& vec,
                                     const TfIdfVector& centroid) {
  FeatureVector x;
  const auto len = std::min(sentence.tokens.size(), kLengthCap);
  x(0) = 1.0;
  x(1) = static_cast<double>(len) / static_cast<double>(kLengthCap);
  x(2) = 1.0 / (1.0 + static_cast<double>(sentence.position));
  x(3) = std::clamp(dot(vec, centroid), 0.0, 1.0);
  return x;
}

}  // namespace

IdfTable::IdfTable(std::map<std::string, std::size_t> document_frequency, std::size_t document_count)
    : df_(std::move(document_frequency)), document_count_(document_count) {
  for (const auto& [term, df] : df_) weights_[term] = idf_value(df, document_count_);
}

double IdfTable::idf(const std::string& term) const {
  auto it = weights_.find(term);
  return it != weights_.end() ? it->second : idf_value(0, document_count_);
}

std::size_t IdfTable::document_frequency(const std::string& term) const {
  auto it = df_.find(term);
  return it != df_.end() ? it->second : 0;
}

IdfTable build_idf(const Cluster& cluster) {
  if (cluster.documents.empty())
    throw ValidationError("build_idf: cluster '" + cluster.topic_id + "' has no documents");
  std::map<std::string, std::size_t> df;
  for (const Document& doc : cluster.documents) {
    std::set<std::string> terms;
    for (std::size_t id : doc.sentence_ids)
      terms.insert(cluster.sentences[id].tokens.begin(), cluster.sentences[id].tokens.end());
    for (const auto& t : terms) ++df[t];
  }
  return IdfTable(std::move(df), cluster.documents.size());
}

TfIdfVector tfidf(const Tokens& tokens, const IdfTable& idf) {
  TfIdfVector v;
  for (const auto& t : tokens) v[t] += 1.0;
  for (auto& [term, w] : v) w *= idf.idf(term);
  normalize(v);
  return v;
}

TfIdfVector tfidf(const Sentence& sentence, const IdfTable& idf) { return tfidf(sentence.tokens, idf); }

double dot(const TfIdfVector& a, const TfIdfVector& b) {
  const TfIdfVector& small = a.size() <= b.size() ? a : b;
  const TfIdfVector& large = a.size() <= b.size() ? b : a;
  double s = 0.0;
  for (const auto& [term, w] : small) {
    auto it = large.find(term);
    if (it != large.end()) s += w * it->second;
  }
  return s;
}

double norm(const TfIdfVector& v) {
  double s = 0.0;
  for (const auto& [term, w] : v) s += w * w;
  return std::sqrt(s);
}

TfIdfVector normalized_centroid(const std::vector<TfIdfVector>& vectors) {
  TfIdfVector c;
  if (vectors.empty()) return c;
  for (const auto& v : vectors)
    for (const auto& [term, w] : v) c[term] += w;
  for (auto& [term, w] : c) w /= static_cast<double>(vectors.size());
  normalize(c);
  return c;
}

FeatureVector quality_features(const Sentence& sentence, const Cluster& cluster, const IdfTable& idf) {
  std::vector<TfIdfVector> vectors;
  vectors.reserve(cluster.size());
  for (const auto& s : cluster.sentences) vectors.push_back(tfidf(s, idf));
  return features_with_centroid(sentence, tfidf(sentence, idf), normalized_centroid(vectors));
}

ClusterFeatures compute_cluster_features(const Cluster& cluster) {
  ClusterFeatures out;
  out.idf = build_idf(cluster);
  out.vectors.reserve(cluster.size());
  for (const auto& s : cluster.sentences) out.vectors.push_back(tfidf(s, out.idf));
  const TfIdfVector centroid = normalized_centroid(out.vectors);
  out.features.resize(static_cast<Eigen::Index>(cluster.size()), kFeatureDim);
  for (std::size_t i = 0; i < cluster.size(); ++i)
    out.features.row(static_cast<Eigen::Index>(i)) =
        features_with_centroid(cluster.sentences[i], out.vectors[i], centroid).transpose();
  return out;
}

}  // namespace dppsum
