// dppsum: extractive multi-document summarization with a DPP.
//
// Exit codes: 0 ok, 2 validation, 3 numerical, 4 I/O.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dppsum/corpus.hpp"
#include "dppsum/errors.hpp"
#include "dppsum/features.hpp"
#include "dppsum/pairgen.hpp"
#include "dppsum/pipeline.hpp"
#include "dppsum/similarity.hpp"
#include "dppsum/training.hpp"

namespace fs = std::filesystem;
using namespace dppsum;

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

std::vector<Cluster> load_clusters(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      auto listed = list_cluster_files(in);
      files.insert(files.end(), listed.begin(), listed.end());
    } else {
      files.emplace_back(in);
    }
  }
  if (files.empty()) throw ValidationError("no cluster files given");
  std::vector<Cluster> clusters;
  for (const auto& f : files) clusters.push_back(load_cluster(f));
  return clusters;
}

void write_output(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    return;
  }
  write_file_atomically(path, contents);
}

SimilarityMode parse_mode(const std::string& s) {
  return s == "combined" ? SimilarityMode::kCombined : SimilarityMode::kCosine;
}

// A capsule path is either one similarity file or a directory holding
// <topic_id>.sim files.
std::optional<SimilarityMatrix> load_caps(const std::string& caps, const Cluster& cluster, std::size_t cluster_count) {
  if (caps.empty()) return std::nullopt;
  fs::path path = caps;
  if (fs::is_directory(path)) {
    path /= cluster.topic_id + ".sim";
  } else if (cluster_count > 1) {
    throw ValidationError("--caps names a single file but " + std::to_string(cluster_count) +
                          " clusters were given; pass a directory of <topic_id>.sim files");
  }
  SimilarityFile file = read_similarity_file(path);
  if (file.topic_id != cluster.topic_id)
    throw ValidationError("capsule similarity '" + path.string() + "' is for topic '" + file.topic_id +
                          "', not '" + cluster.topic_id + "'");
  if (file.matrix.n() != static_cast<Eigen::Index>(cluster.size()))
    throw ValidationError("capsule similarity '" + path.string() + "' has n=" + std::to_string(file.matrix.n()) +
                          " but cluster '" + cluster.topic_id + "' has " + std::to_string(cluster.size()) +
                          " sentences");
  return std::move(file.matrix);
}

int run(int argc, char** argv) {
  CLI::App app{"DPP-based extractive multi-document summarizer"};
  app.set_config("--config", "", "Read flags from a TOML/INI config file (flags take precedence)");
  app.require_subcommand(1);

  PipelineConfig cfg;

  // oracle
  std::vector<std::string> oracle_in;
  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle", "Build LCS oracle extractive labels from reference summaries");
  oracle->add_option("clusters,--cluster", oracle_in, "Cluster files or directories")->required();
  oracle->add_option("--budget", cfg.budget_words, "Word budget for the oracle")->capture_default_str();
  oracle->add_option("--out", oracle_out, "Output JSON file (default stdout)");

  // train
  std::vector<std::string> train_in;
  std::string train_out;
  auto* train = app.add_subcommand("train", "Fit quality weights by DPP maximum likelihood");
  train->add_option("clusters,--clusters", train_in, "Training cluster files or directories")->required();
  train->add_option("--out", train_out, "Model JSON output path")->required();
  train->add_option("--lr", cfg.learning_rate, "Learning rate")->capture_default_str();
  train->add_option("--epochs", cfg.epochs, "Number of epochs")->capture_default_str();
  train->add_option("--seed", cfg.seed, "Seed")->capture_default_str();
  train->add_option("--budget", cfg.budget_words, "Oracle word budget")->capture_default_str();

  // summarize
  std::vector<std::string> sum_in;
  std::string sum_model, sum_caps, sum_mode = "cosine", sum_out_dir, sum_report;
  auto* summarize = app.add_subcommand("summarize", "Summarize clusters with greedy DPP MAP inference");
  summarize->add_option("clusters,--cluster", sum_in, "Cluster files or directories")->required();
  summarize->add_option("--model", sum_model, "Model JSON from `train`")->required();
  summarize->add_option("--sim", sum_mode, "Similarity: cosine or combined")
      ->check(CLI::IsMember({"cosine", "combined"}))
      ->capture_default_str();
  summarize->add_option("--caps", sum_caps, "Capsule similarity file, or directory of <topic_id>.sim files");
  summarize->add_option("--lambda-c", cfg.lambda_c, "Capsule interpolation weight")->capture_default_str();
  summarize->add_option("--budget", cfg.budget_words, "Summary word budget")->capture_default_str();
  summarize->add_flag("--exact", cfg.exact, "Exhaustive MAP search (clusters of at most 20 sentences)");
  summarize->add_option("--out-dir", sum_out_dir, "Write <topic_id>.txt summaries here");
  summarize->add_option("--report", sum_report, "Write the report here instead of stdout");

  // evaluate
  std::string eval_run, eval_clusters, eval_out;
  bool eval_stem = true;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "ROUGE-1/2/SU4 of summaries against references");
  evaluate_cmd->add_option("--run-dir", eval_run, "Directory of <topic_id>.txt summaries")->required();
  evaluate_cmd->add_option("--clusters-dir", eval_clusters, "Directory of cluster files")->required();
  evaluate_cmd->add_flag("--stem,!--no-stem", eval_stem, "Porter stemming (default on)");
  evaluate_cmd->add_option("--out", eval_out, "CSV output path (default stdout)");

  // make-pairs
  std::string pairs_in, pairs_out;
  bool pairs_stem = false;
  double neg_ratio = 1.0;
  auto* make_pairs = app.add_subcommand("make-pairs", "Mine redundant/non-redundant sentence pairs");
  make_pairs->add_option("--input", pairs_in, "Articles JSONL")->required();
  make_pairs->add_option("--out", pairs_out, "Pairs JSONL output (default stdout)");
  make_pairs->add_option("--threshold", cfg.threshold, "Minimum averaged ROUGE F for positives")
      ->capture_default_str();
  make_pairs->add_option("--seed", cfg.seed, "Seed for negative sampling")->capture_default_str();
  make_pairs->add_option("--neg-ratio", neg_ratio, "Negatives per positive, per article")->capture_default_str();
  make_pairs->add_flag("--stem,!--no-stem", pairs_stem, "Porter stemming (default off)");

  // fuse-sim
  std::string fuse_cluster, fuse_caps, fuse_out;
  auto* fuse = app.add_subcommand("fuse-sim", "Interpolate cosine and capsule similarity, PSD-repaired");
  fuse->add_option("--cluster", fuse_cluster, "Cluster file")->required();
  fuse->add_option("--caps", fuse_caps, "Capsule similarity file")->required();
  fuse->add_option("--lambda-c", cfg.lambda_c, "Capsule interpolation weight")->capture_default_str();
  fuse->add_option("--out", fuse_out, "Output similarity file (default stdout)");

  // heatmap
  std::string heat_cluster, heat_caps, heat_mode = "cosine", heat_out;
  long heat_max = 200;
  auto* heatmap = app.add_subcommand("heatmap", "Export a similarity heatmap as CSV and PGM");
  heatmap->add_option("--cluster", heat_cluster, "Cluster file")->required();
  heatmap->add_option("--sim", heat_mode, "Similarity: cosine or combined")
      ->check(CLI::IsMember({"cosine", "combined"}))
      ->capture_default_str();
  heatmap->add_option("--caps", heat_caps, "Capsule similarity file");
  heatmap->add_option("--lambda-c", cfg.lambda_c, "Capsule interpolation weight")->capture_default_str();
  heatmap->add_option("--max-n", heat_max, "Crop to the first N sentences")->capture_default_str();
  heatmap->add_option("--out", heat_out, "Output base path (writes .csv and .pgm)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  cfg.validate();

  if (*oracle) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : load_clusters(oracle_in)) {
      const OracleLabel label = oracle_labels(c, cfg.budget_words);
      out.push_back({{"topic_id", label.topic_id}, {"indices", label.indices}});
    }
    write_output(oracle_out, out.dump(2) + "\n");
  } else if (*train) {
    std::vector<std::string> warnings;
    const TrainingSet data = build_training_set(load_clusters(train_in), cfg.budget_words, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    const TrainResult result = train_dpp(data, {cfg.learning_rate, cfg.epochs, cfg.seed});
    for (std::size_t e = 0; e < result.epoch_log_likelihood.size(); ++e)
      std::cout << "epoch " << e << " log_likelihood " << result.epoch_log_likelihood[e] << '\n';
    save_model(result.model, train_out);
  } else if (*summarize) {
    cfg.mode = parse_mode(sum_mode);
    if (cfg.mode == SimilarityMode::kCombined && sum_caps.empty())
      throw ValidationError("--sim combined requires --caps");
    const QualityModel model = load_model(sum_model);
    const auto clusters = load_clusters(sum_in);
    if (!sum_out_dir.empty()) fs::create_directories(sum_out_dir);
    std::string report;
    for (const auto& c : clusters) {
      std::optional<SimilarityMatrix> caps;
      if (cfg.mode == SimilarityMode::kCombined) caps = load_caps(sum_caps, c, clusters.size());
      const SummaryResult result = summarize_cluster(c, model, cfg, caps ? &*caps : nullptr);
      report += format_summary_report(result);
      if (!sum_out_dir.empty())
        write_file_atomically(fs::path(sum_out_dir) / (c.topic_id + ".txt"), format_summary_text(result));
    }
    write_output(sum_report, report);
  } else if (*evaluate_cmd) {
    const EvaluationReport report = evaluate(eval_run, eval_clusters, eval_stem);
    for (const auto& t : report.missing)
      std::cerr << "warning: no summary for topic '" << t << "', excluded from the average\n";
    write_output(eval_out, format_evaluation_csv(report));
  } else if (*make_pairs) {
    if (!(neg_ratio >= 0.0)) throw ValidationError("--neg-ratio must be non-negative");
    const auto articles = parse_articles_jsonl(read_text_file(pairs_in), pairs_in);
    PairMiningStats stats;
    const auto pairs = mine_pairs(articles, {cfg.threshold, cfg.seed, pairs_stem, neg_ratio}, &stats);
    for (const auto& w : stats.warnings) std::cerr << "warning: " << w << '\n';
    std::cerr << "articles " << stats.articles << " positives " << stats.positives << " negatives "
              << stats.negatives << '\n';
    write_output(pairs_out, format_pairs_jsonl(pairs));
  } else if (*fuse) {
    const Cluster c = load_cluster(fuse_cluster);
    const auto caps = load_caps(fuse_caps, c, 1);
    const SimilarityMatrix s =
        cluster_similarity(c, compute_cluster_features(c), SimilarityMode::kCombined, &*caps, cfg.lambda_c);
    write_output(fuse_out, format_similarity_file(s, c.topic_id));
  } else if (*heatmap) {
    const Cluster c = load_cluster(heat_cluster);
    const SimilarityMode mode = parse_mode(heat_mode);
    if (mode == SimilarityMode::kCombined && heat_caps.empty())
      throw ValidationError("--sim combined requires --caps");
    std::optional<SimilarityMatrix> caps;
    if (mode == SimilarityMode::kCombined) caps = load_caps(heat_caps, c, 1);
    const SimilarityMatrix s =
        cluster_similarity(c, compute_cluster_features(c), mode, caps ? &*caps : nullptr, cfg.lambda_c);
    const HeatmapPaths paths = emit_heatmap(s, heat_out, heat_max);
    std::cout << paths.csv.string() << '\n' << paths.pgm.string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  }
}
