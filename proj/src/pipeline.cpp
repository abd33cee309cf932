#include "dppsum/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dppsum/errors.hpp"
#include "dppsum/features.hpp"

namespace dppsum {
namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

const char* const kMetrics[] = {"R-1", "R-2", "R-SU4"};

}  // namespace

void PipelineConfig::validate() const {
  if (budget_words < 1) throw ValidationError("budget must be at least 1 word");
  if (!(lambda_c >= 0.0 && lambda_c <= 1.0)) throw ValidationError("lambda_c must lie in [0,1]");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("threshold must lie in [0,1]");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ValidationError("learning rate must be a non-negative number");
}

SimilarityMatrix cluster_similarity(const Cluster& cluster, const ClusterFeatures& features, SimilarityMode mode,
                                    const SimilarityMatrix* caps, double lambda_c) {
  SimilarityMatrix s = cosine_matrix(features.vectors);
  if (mode == SimilarityMode::kCombined) {
    if (!caps) throw ValidationError("combined similarity needs a capsule similarity file");
    if (caps->n() != s.n())
      throw ValidationError("capsule similarity file has n=" + std::to_string(caps->n()) + " but cluster '" +
                            cluster.topic_id + "' has " + std::to_string(s.n()) + " sentences");
    s = combine(s, *caps, lambda_c);
  }
  return project_psd(s);
}

SummaryResult summarize_cluster(const Cluster& cluster, const QualityModel& model, const PipelineConfig& config,
                                const SimilarityMatrix* caps) {
  config.validate();
  SummaryResult result;
  result.topic_id = cluster.topic_id;
  if (cluster.size() == 0) return result;

  const ClusterFeatures features = compute_cluster_features(cluster);
  const SimilarityMatrix s = cluster_similarity(cluster, features, config.mode, caps, config.lambda_c);
  const LEnsemble l = build_l(model.quality(features.features), s);
  const std::span<const Sentence> sentences(cluster.sentences);
  result.selection = config.exact ? exhaustive_map(l, sentences, config.budget_words).selection
                                  : greedy_map(l, sentences, config.budget_words);

  IndexSet ordered = result.selection.indices;
  std::sort(ordered.begin(), ordered.end());
  for (std::size_t i : ordered) result.sentences.push_back(&cluster.sentences[i]);
  return result;
}

std::string format_summary_report(const SummaryResult& result) {
  std::ostringstream out;
  out << "topic: " << result.topic_id << '\n';
  out << "selected:";
  for (std::size_t i : result.selection.indices) out << ' ' << i;
  out << '\n';
  out << "sentences: " << result.selection.indices.size() << '\n';
  out << "words: " << result.selection.word_count << '\n';
  out << "log_prob: " << fixed(result.selection.log_prob) << '\n';
  for (const Sentence* s : result.sentences) out << '[' << s->id << "] " << s->raw << '\n';
  return out.str();
}

std::string format_summary_text(const SummaryResult& result) {
  std::string out;
  for (const Sentence* s : result.sentences) {
    out += s->raw;
    out.push_back('\n');
  }
  return out;
}

TrainingSet build_training_set(const std::vector<Cluster>& clusters, std::size_t budget_words,
                               std::vector<std::string>* warnings) {
  TrainingSet data;
  for (const Cluster& cluster : clusters) {
    if (cluster.size() == 0) continue;
    const ClusterFeatures features = compute_cluster_features(cluster);
    TrainingInstance inst;
    inst.topic_id = cluster.topic_id;
    inst.features = features.features;
    inst.similarity = cluster_similarity(cluster, features, SimilarityMode::kCosine, nullptr, 0.0);
    const OracleLabel oracle = oracle_labels(cluster, budget_words);
    inst.label = prune_singular_label(inst.similarity, oracle.indices);
    if (warnings && inst.label.size() != oracle.indices.size())
      warnings->push_back("cluster '" + cluster.topic_id + "': dropped " +
                          std::to_string(oracle.indices.size() - inst.label.size()) +
                          " duplicate oracle sentence(s)");
    data.push_back(std::move(inst));
  }
  return data;
}

std::vector<EvaluationRow> score_summary(const std::string& topic_id, const Tokens& candidate,
                                         const std::vector<Tokens>& references, bool stem) {
  std::vector<Tokens> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.push_back(content_tokens(r));
  RougeOptions opts;
  opts.stem = stem;
  opts.length_limit = kEvaluationWordLimit;
  const Tokens cand = content_tokens(candidate);
  return {
      {topic_id, kMetrics[0], rouge_n(cand, refs, 1, opts)},
      {topic_id, kMetrics[1], rouge_n(cand, refs, 2, opts)},
      {topic_id, kMetrics[2], rouge_su4(cand, refs, opts)},
  };
}

EvaluationReport evaluate(const std::filesystem::path& run_dir, const std::filesystem::path& clusters_dir, bool stem) {
  EvaluationReport report;
  std::vector<EvaluationRow> scored;
  for (const auto& path : list_cluster_files(clusters_dir)) {
    const Cluster cluster = load_cluster(path);
    if (cluster.references.empty())
      throw ValidationError("cluster '" + cluster.topic_id + "' has no reference summaries");
    const auto summary_path = run_dir / (cluster.topic_id + ".txt");
    if (!std::filesystem::exists(summary_path)) {
      report.missing.push_back(cluster.topic_id);
      continue;
    }
    const auto rows = score_summary(cluster.topic_id, tokenize(read_text_file(summary_path)), cluster.references, stem);
    scored.insert(scored.end(), rows.begin(), rows.end());
  }
  report.rows = scored;
  const std::size_t topics = scored.size() / 3;
  for (std::size_t m = 0; m < 3; ++m) {
    EvaluationRow avg{"AVERAGE", kMetrics[m], {}};
    if (topics > 0) {
      for (std::size_t t = 0; t < topics; ++t) {
        avg.score.precision += scored[t * 3 + m].score.precision;
        avg.score.recall += scored[t * 3 + m].score.recall;
        avg.score.f1 += scored[t * 3 + m].score.f1;
      }
      avg.score.precision /= static_cast<double>(topics);
      avg.score.recall /= static_cast<double>(topics);
      avg.score.f1 /= static_cast<double>(topics);
    }
    report.rows.push_back(avg);
  }
  return report;
}

std::string format_evaluation_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "topic_id,metric,precision,recall,f1\n";
  for (const auto& row : report.rows) {
    out << row.topic_id << ',' << row.metric << ',' << fixed(row.score.precision) << ','
        << fixed(row.score.recall) << ',' << fixed(row.score.f1) << '\n';
  }
  for (const auto& topic : report.missing) out << topic << ",MISSING,,,\n";
  return out.str();
}

}  // namespace dppsum
