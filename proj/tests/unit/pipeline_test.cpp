#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "dppsum/errors.hpp"
#include "dppsum/features.hpp"
#include "dppsum/pipeline.hpp"

using namespace dppsum;
namespace fs = std::filesystem;

namespace {

const fs::path kClusters = fs::path(DPPSUM_FIXTURE_DIR) / "clusters";

std::vector<Cluster> fixture_clusters() {
  std::vector<Cluster> out;
  for (const auto& p : list_cluster_files(kClusters)) out.push_back(load_cluster(p));
  return out;
}

const QualityModel& trained_model() {
  static const QualityModel model = train_dpp(build_training_set(fixture_clusters(), 100), TrainConfig{}).model;
  return model;
}

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() / ("dppsum_" + std::string(info->test_suite_name()) + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST(Summarize, TrainedModelStaysWithinBudgetAndIsDeterministic) {
  for (const Cluster& c : fixture_clusters()) {
    PipelineConfig cfg;
    const SummaryResult a = summarize_cluster(c, trained_model(), cfg);
    const SummaryResult b = summarize_cluster(c, trained_model(), cfg);
    EXPECT_EQ(format_summary_report(a), format_summary_report(b));
    EXPECT_FALSE(a.selection.indices.empty()) << c.topic_id;
    EXPECT_LE(a.selection.word_count, 100u);
    std::size_t words = 0;
    for (const Sentence* s : a.sentences) words += s->tokens.size();
    EXPECT_EQ(words, a.selection.word_count);
    for (std::size_t k = 1; k < a.sentences.size(); ++k) EXPECT_LT(a.sentences[k - 1]->id, a.sentences[k]->id);
  }
}

TEST(Summarize, NeutralModelSelectsNothing) {
  // q = 1 everywhere: no subset has det(S_Y) above det of the empty set.
  const Cluster c = fixture_clusters().front();
  const SummaryResult r = summarize_cluster(c, QualityModel::neutral(kFeatureDim), PipelineConfig{});
  EXPECT_TRUE(r.selection.indices.empty());
  EXPECT_EQ(format_summary_text(r), "");
}

TEST(Summarize, BudgetOfOneWordFitsNothing) {
  PipelineConfig cfg;
  cfg.budget_words = 1;
  const SummaryResult r = summarize_cluster(fixture_clusters().front(), trained_model(), cfg);
  EXPECT_TRUE(r.selection.indices.empty());
  cfg.budget_words = 0;
  EXPECT_THROW(summarize_cluster(fixture_clusters().front(), trained_model(), cfg), ValidationError);
}

TEST(Summarize, ExactAgreesWithGreedyOrBeatsIt) {
  for (const Cluster& c : fixture_clusters()) {
    PipelineConfig cfg;
    const SummaryResult g = summarize_cluster(c, trained_model(), cfg);
    cfg.exact = true;
    const SummaryResult e = summarize_cluster(c, trained_model(), cfg);
    EXPECT_GE(e.selection.log_prob, g.selection.log_prob - 1e-12) << c.topic_id;
    EXPECT_LE(e.selection.word_count, 100u);
  }
}

TEST(Summarize, CombinedWithZeroLambdaEqualsCosine) {
  const Cluster c = load_cluster(kClusters / "d001_snowstorm.json");
  const SimilarityFile caps = read_similarity_file(fs::path(DPPSUM_FIXTURE_DIR) / "caps" / "d001.sim");
  PipelineConfig cfg;
  const std::string cosine = format_summary_report(summarize_cluster(c, trained_model(), cfg));
  cfg.mode = SimilarityMode::kCombined;
  cfg.lambda_c = 0.0;
  EXPECT_EQ(format_summary_report(summarize_cluster(c, trained_model(), cfg, &caps.matrix)), cosine);
  cfg.lambda_c = 0.2;
  const SummaryResult mixed = summarize_cluster(c, trained_model(), cfg, &caps.matrix);
  EXPECT_LE(mixed.selection.word_count, 100u);
}

TEST(Summarize, CombinedErrors) {
  const Cluster c = load_cluster(kClusters / "d001_snowstorm.json");
  PipelineConfig cfg;
  cfg.mode = SimilarityMode::kCombined;
  EXPECT_THROW(summarize_cluster(c, trained_model(), cfg, nullptr), ValidationError);
  const SimilarityMatrix small = SimilarityMatrix::identity(3);
  try {
    summarize_cluster(c, trained_model(), cfg, &small);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("n=3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("12 sentences"), std::string::npos) << msg;
  }
  cfg.lambda_c = 1.5;
  EXPECT_THROW(summarize_cluster(c, trained_model(), cfg, &small), ValidationError);
}

TEST(Summarize, CombinedSimilarityIsPsd) {
  const Cluster c = load_cluster(kClusters / "d001_snowstorm.json");
  const SimilarityFile caps = read_similarity_file(fs::path(DPPSUM_FIXTURE_DIR) / "caps" / "d001.sim");
  const ClusterFeatures f = compute_cluster_features(c);
  for (double lambda : {0.0, 0.2, 0.5, 1.0}) {
    const SimilarityMatrix s = cluster_similarity(c, f, SimilarityMode::kCombined, &caps.matrix, lambda);
    EXPECT_GE(min_eigenvalue(s.values()), -kPsdEps) << lambda;
    EXPECT_EQ(check_similarity_invariants(s.values()), "");
  }
}

TEST(Report, Format) {
  const Cluster c = parse_cluster(R"({"topic_id":"t","documents":[{"doc_id":"a","sentences":["One two.","Three."]}]})", "t");
  SummaryResult r;
  r.topic_id = "t";
  r.selection.indices = {1, 0};
  r.selection.word_count = 5;
  r.selection.log_prob = -1.25;
  r.sentences = {&c.sentences[0], &c.sentences[1]};
  EXPECT_EQ(format_summary_report(r),
            "topic: t\nselected: 1 0\nsentences: 2\nwords: 5\nlog_prob: -1.250000\n[0] One two.\n[1] Three.\n");
  EXPECT_EQ(format_summary_text(r), "One two.\nThree.\n");
}

TEST(TrainingSet, FixtureLabelsAreNonSingular) {
  std::vector<std::string> warnings;
  const TrainingSet data = build_training_set(fixture_clusters(), 100, &warnings);
  ASSERT_EQ(data.size(), 3u);
  EXPECT_TRUE(std::isfinite(log_likelihood(Eigen::VectorXd::Zero(kFeatureDim), data)));
  for (const auto& inst : data) {
    EXPECT_EQ(inst.features.rows(), 12);
    EXPECT_FALSE(inst.label.empty());
  }
}

TEST(Evaluate, ReferenceAsSummaryScoresOneAndMissingIsFlagged) {
  const fs::path run = scratch_dir();
  const Cluster c = load_cluster(kClusters / "d001_snowstorm.json");
  write(run / "d001.txt", join_tokens(c.references.front()) + "\n");
  write(run / (fixture_clusters()[1].topic_id + ".txt"), "");
  const EvaluationReport report = evaluate(run, kClusters, true);
  ASSERT_EQ(report.missing.size(), 1u);
  EXPECT_EQ(report.missing.front(), fixture_clusters()[2].topic_id);
  ASSERT_EQ(report.rows.size(), 9u);
  EXPECT_EQ(report.rows[0].topic_id, c.topic_id);
  EXPECT_EQ(report.rows[0].metric, "R-1");
  EXPECT_DOUBLE_EQ(report.rows[0].score.f1, 1.0);
  for (std::size_t k = 3; k < 6; ++k) EXPECT_EQ(report.rows[k].score, RougeScore{});
  EXPECT_EQ(report.rows[6].topic_id, "AVERAGE");
  EXPECT_DOUBLE_EQ(report.rows[6].score.f1, 0.5);

  const std::string csv = format_evaluation_csv(report);
  EXPECT_EQ(csv.rfind("topic_id,metric,precision,recall,f1\n", 0), 0u);
  EXPECT_NE(csv.find(fixture_clusters()[2].topic_id + ",MISSING,,,\n"), std::string::npos);
  fs::remove_all(run);
}

TEST(Evaluate, MatchesDirectScoring) {
  const fs::path run = scratch_dir();
  const auto clusters = fixture_clusters();
  for (const Cluster& c : clusters) write(run / (c.topic_id + ".txt"), format_summary_text(summarize_cluster(c, trained_model(), PipelineConfig{})));
  const EvaluationReport report = evaluate(run, kClusters, true);
  EXPECT_TRUE(report.missing.empty());
  for (std::size_t t = 0; t < clusters.size(); ++t) {
    const auto direct = score_summary(clusters[t].topic_id, tokenize(read_text_file(run / (clusters[t].topic_id + ".txt"))),
                                      clusters[t].references, true);
    for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(report.rows[t * 3 + m].score, direct[m].score);
  }
  fs::remove_all(run);
}

TEST(Evaluate, LongCandidateIsTruncated) {
  const Tokens ref = tokenize("alpha beta");
  Tokens cand(150, "filler");
  cand.push_back("alpha");
  EXPECT_EQ(score_summary("t", cand, {ref}, false)[0].score.recall, 0.0);
  cand.insert(cand.begin(), "beta");
  EXPECT_DOUBLE_EQ(score_summary("t", cand, {ref}, false)[0].score.precision, 0.01);
}
