#include "dppsum/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "dppsum/errors.hpp"
#include "json.hpp"

namespace dppsum {
namespace {

using nlohmann::json;

constexpr double kMinScale = 1e-12;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check_instance(const TrainingInstance& inst, Eigen::Index dim, std::size_t m) {
  const auto where = "training instance " + std::to_string(m) + " ('" + inst.topic_id + "')";
  if (inst.features.rows() != inst.similarity.n())
    throw ValidationError(where + ": " + std::to_string(inst.features.rows()) + " feature rows for a " +
                          std::to_string(inst.similarity.n()) + "-sentence similarity matrix");
  if (inst.features.cols() != dim)
    throw ValidationError(where + ": feature dimension " + std::to_string(inst.features.cols()) +
                          " does not match theta dimension " + std::to_string(dim));
  std::vector<bool> seen(static_cast<std::size_t>(inst.features.rows()), false);
  for (std::size_t i : inst.label) {
    if (i >= seen.size() || seen[i])
      throw ValidationError(where + ": label index " + std::to_string(i) + " is out of range or repeated");
    seen[i] = true;
  }
}

Eigen::VectorXd to_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field + ": expected array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(field + "[" + std::to_string(i) + "]: expected number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json from_vector(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::size_t> lcs_matched_positions(const Tokens& a, const Tokens& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> table((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return table[i * (m + 1) + j]; };
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = a[i - 1] == b[j - 1] ? at(i - 1, j - 1) + 1 : std::max(at(i - 1, j), at(i, j - 1));

  std::vector<std::size_t> matched;
  std::size_t i = n, j = m;
  while (i > 0 && j > 0) {
    if (a[i - 1] == b[j - 1]) {
      matched.push_back(j - 1);
      --i;
      --j;
    } else if (at(i - 1, j) >= at(i, j - 1)) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(matched.begin(), matched.end());
  return matched;
}

OracleLabel oracle_labels(const Cluster& cluster, std::size_t budget_words) {
  if (cluster.references.empty())
    throw ValidationError("oracle_labels: cluster '" + cluster.topic_id + "' has no reference summaries");

  std::vector<Tokens> refs;
  refs.reserve(cluster.references.size());
  for (const auto& r : cluster.references) refs.push_back(content_tokens(r));
  std::vector<Tokens> sents;
  sents.reserve(cluster.size());
  for (const auto& s : cluster.sentences) sents.push_back(content_tokens(s.tokens));

  OracleLabel label{cluster.topic_id, {}};
  std::vector<bool> chosen(cluster.size(), false);
  std::size_t words = 0;
  while (words < budget_words) {
    std::size_t best = cluster.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      if (chosen[i]) continue;
      std::size_t gain = 0;
      for (const auto& r : refs) gain += lcs_length(sents[i], r);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best_gain == 0) break;
    chosen[best] = true;
    label.indices.push_back(best);
    words += cluster.sentences[best].tokens.size();
    for (auto& r : refs) {
      const auto matched = lcs_matched_positions(sents[best], r);
      for (auto it = matched.rbegin(); it != matched.rend(); ++it)
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(*it));
    }
  }
  return label;
}

Eigen::VectorXd qualities(const Eigen::MatrixXd& features, const Eigen::VectorXd& theta) {
  return (features * theta).array().exp().matrix();
}

LikelihoodReport evaluate_likelihood(const Eigen::VectorXd& theta, const TrainingSet& data) {
  LikelihoodReport report;
  for (std::size_t m = 0; m < data.size(); ++m) {
    const auto& inst = data[m];
    check_instance(inst, theta.size(), m);
    const LEnsemble l = build_l(qualities(inst.features, theta), inst.similarity);
    const double term = subset_log_det(l, inst.label);
    if (!std::isfinite(term)) report.singular.push_back(m);
    report.value += term - l.log_normalizer();
  }
  return report;
}

double log_likelihood(const Eigen::VectorXd& theta, const TrainingSet& data) {
  return evaluate_likelihood(theta, data).value;
}

namespace {

Eigen::VectorXd instance_gradient(const Eigen::VectorXd& theta, const TrainingInstance& inst) {
  const LEnsemble l = build_l(qualities(inst.features, theta), inst.similarity);
  const Eigen::VectorXd k_diag = marginal_kernel(l).diagonal();
  Eigen::VectorXd g = -(inst.features.transpose() * k_diag);
  for (std::size_t i : inst.label) g += inst.features.row(static_cast<Eigen::Index>(i)).transpose();
  return 2.0 * g;
}

}  // namespace

Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const TrainingSet& data) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
  for (std::size_t m = 0; m < data.size(); ++m) {
    check_instance(data[m], theta.size(), m);
    g += instance_gradient(theta, data[m]);
  }
  return g;
}

QualityModel QualityModel::neutral(Eigen::Index dim) {
  QualityModel m;
  m.theta = Eigen::VectorXd::Zero(dim);
  m.feature_means = Eigen::VectorXd::Zero(dim);
  m.feature_scales = Eigen::VectorXd::Ones(dim);
  m.trained_on = "none";
  return m;
}

Eigen::MatrixXd QualityModel::standardize(const Eigen::MatrixXd& features) const {
  if (features.cols() != theta.size())
    throw ValidationError("model expects " + std::to_string(theta.size()) + " features, got " +
                          std::to_string(features.cols()));
  Eigen::MatrixXd out = features.rowwise() - feature_means.transpose();
  return out.array().rowwise() / feature_scales.transpose().array();
}

Eigen::VectorXd QualityModel::quality(const Eigen::MatrixXd& features) const {
  return qualities(standardize(features), theta);
}

void fit_standardization(const TrainingSet& data, Eigen::VectorXd& means, Eigen::VectorXd& scales) {
  if (data.empty()) throw ValidationError("fit_standardization: no training data");
  const Eigen::Index dim = data.front().features.cols();
  means = Eigen::VectorXd::Zero(dim);
  scales = Eigen::VectorXd::Ones(dim);
  Eigen::Index rows = 0;
  for (const auto& inst : data) rows += inst.features.rows();
  if (rows == 0) return;

  Eigen::MatrixXd all(rows, dim);
  Eigen::Index r = 0;
  for (const auto& inst : data) {
    all.middleRows(r, inst.features.rows()) = inst.features;
    r += inst.features.rows();
  }
  for (Eigen::Index j = 1; j < dim; ++j) {
    const double mean = all.col(j).mean();
    const double var = (all.col(j).array() - mean).square().mean();
    means(j) = mean;
    scales(j) = std::sqrt(var) > kMinScale ? std::sqrt(var) : 1.0;
  }
}

std::string fingerprint(const TrainingSet& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& inst : data) {
    h = fnv1a(h, inst.topic_id);
    h = fnv1a(h, "#" + std::to_string(inst.features.rows()) + ":");
    for (std::size_t i : inst.label) h = fnv1a(h, std::to_string(i) + ",");
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TrainResult train_dpp(const TrainingSet& data, const TrainConfig& config) {
  if (data.empty()) throw ValidationError("train_dpp: no training data");
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate))
    throw ValidationError("train_dpp: learning rate must be a non-negative number");

  TrainResult result;
  QualityModel& model = result.model;
  model = QualityModel::neutral(data.front().features.cols());
  fit_standardization(data, model.feature_means, model.feature_scales);
  model.trained_on = fingerprint(data);

  TrainingSet scaled = data;
  for (auto& inst : scaled) inst.features = model.standardize(inst.features);

  std::vector<std::size_t> order(scaled.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  auto checked_likelihood = [&](std::size_t epoch) {
    const LikelihoodReport report = evaluate_likelihood(model.theta, scaled);
    if (!std::isfinite(report.value)) {
      std::ostringstream msg;
      msg << "train_dpp: non-finite log-likelihood at epoch " << epoch << " (theta = ["
          << model.theta.transpose() << "])";
      for (std::size_t m : report.singular) msg << "; singular oracle subset in '" << scaled[m].topic_id << "'";
      throw NumericalError(msg.str());
    }
    return report.value;
  };

  result.epoch_log_likelihood.push_back(checked_likelihood(0));
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(model.theta.size());
    for (std::size_t m : order) g += instance_gradient(model.theta, scaled[m]);
    if (!g.allFinite()) throw NumericalError("train_dpp: non-finite gradient at epoch " + std::to_string(epoch));
    model.theta += config.learning_rate * g;
    result.epoch_log_likelihood.push_back(checked_likelihood(epoch));
  }
  return result;
}

IndexSet prune_singular_label(const SimilarityMatrix& s, const IndexSet& label) {
  IndexSet kept;
  for (std::size_t i : label) {
    kept.push_back(i);
    if (!std::isfinite(log_det_psd(principal_submatrix(s.values(), kept)))) kept.pop_back();
  }
  return kept;
}

std::string model_to_json(const QualityModel& model) {
  json j;
  j["theta"] = from_vector(model.theta);
  j["feature_means"] = from_vector(model.feature_means);
  j["feature_scales"] = from_vector(model.feature_scales);
  j["trained_on"] = model.trained_on;
  return j.dump(2) + "\n";
}

QualityModel model_from_json(std::string_view text, std::string_view source) {
  const std::string src(source);
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(src + ": malformed model JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw ParseError(src + ": model must be a JSON object");
  auto field = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(src + ": missing field '" + key + "'");
    return *it;
  };
  QualityModel m;
  m.theta = to_vector(field("theta"), src + ": theta");
  m.feature_means = to_vector(field("feature_means"), src + ": feature_means");
  m.feature_scales = to_vector(field("feature_scales"), src + ": feature_scales");
  const json& trained = field("trained_on");
  if (!trained.is_string()) throw ParseError(src + ": trained_on: expected string");
  m.trained_on = trained.get<std::string>();

  if (m.feature_means.size() != m.theta.size() || m.feature_scales.size() != m.theta.size())
    throw ValidationError(src + ": theta, feature_means and feature_scales differ in length");
  if (!m.theta.allFinite() || !m.feature_means.allFinite())
    throw ValidationError(src + ": model contains non-finite values");
  for (Eigen::Index i = 0; i < m.feature_scales.size(); ++i)
    if (!(m.feature_scales(i) > 0.0) || !std::isfinite(m.feature_scales(i)))
      throw ValidationError(src + ": feature_scales[" + std::to_string(i) + "] must be positive");
  return m;
}

void save_model(const QualityModel& model, const std::filesystem::path& path) {
  write_file_atomically(path, model_to_json(model));
}

QualityModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_text_file(path), path.string());
}

}  // namespace dppsum
