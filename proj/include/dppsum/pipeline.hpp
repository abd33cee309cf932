#ifndef DPPSUM_PIPELINE_HPP
#define DPPSUM_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dppsum/corpus.hpp"
#include "dppsum/dpp.hpp"
#include "dppsum/rouge.hpp"
#include "dppsum/similarity.hpp"
#include "dppsum/training.hpp"

namespace dppsum {

enum class SimilarityMode { kCosine, kCombined };

inline constexpr double kDefaultLambdaC = 0.2;

struct PipelineConfig {
  std::size_t budget_words = kDefaultBudgetWords;
  double lambda_c = kDefaultLambdaC;
  double threshold = 0.25;
  double learning_rate = 1e-3;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  bool stem = true;
  bool exact = false;
  SimilarityMode mode = SimilarityMode::kCosine;

  // Throws ValidationError if budget < 1 or lambda_c outside [0, 1].
  void validate() const;
};

// Cosine TF-IDF similarity, optionally fused with capsule scores, then PSD
// repaired. `caps` is required for kCombined and must match the cluster size.
SimilarityMatrix cluster_similarity(const Cluster& cluster, const ClusterFeatures& features, SimilarityMode mode,
                                    const SimilarityMatrix* caps, double lambda_c);

struct SummaryResult {
  std::string topic_id;
  SummarySelection selection;
  std::vector<const Sentence*> sentences;  // selected, in document order
};

SummaryResult summarize_cluster(const Cluster& cluster, const QualityModel& model, const PipelineConfig& config,
                                const SimilarityMatrix* caps = nullptr);

// Human-readable report: header lines followed by "[id] raw" per sentence.
std::string format_summary_report(const SummaryResult& result);
// Raw sentences, one per line, in document order.
std::string format_summary_text(const SummaryResult& result);

// Features + cosine similarity + oracle labels for every cluster. Label
// entries that would make S_Yhat singular are dropped with a warning.
TrainingSet build_training_set(const std::vector<Cluster>& clusters, std::size_t budget_words,
                               std::vector<std::string>* warnings = nullptr);

struct EvaluationRow {
  std::string topic_id;
  std::string metric;  // "R-1", "R-2", "R-SU4"
  RougeScore score;
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;     // per topic, then macro averages (topic "AVERAGE")
  std::vector<std::string> missing;    // topics with no summary file
};

inline constexpr std::size_t kEvaluationWordLimit = 100;

// Scores one candidate against a cluster's references: R-1, R-2, R-SU4 with
// punctuation removed and the candidate truncated to 100 words.
std::vector<EvaluationRow> score_summary(const std::string& topic_id, const Tokens& candidate,
                                         const std::vector<Tokens>& references, bool stem);

// Reads `<run_dir>/<topic_id>.txt` for every cluster in `clusters_dir`.
EvaluationReport evaluate(const std::filesystem::path& run_dir, const std::filesystem::path& clusters_dir, bool stem);

std::string format_evaluation_csv(const EvaluationReport& report);

}  // namespace dppsum

#endif  // DPPSUM_PIPELINE_HPP
