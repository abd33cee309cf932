#ifndef DPPSUM_PAIRGEN_HPP
#define DPPSUM_PAIRGEN_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dppsum/corpus.hpp"

namespace dppsum {

// A labeled sentence pair. For positives `a` is the abstract sentence and `b`
// its best-matching article sentence; negatives are two article sentences.
struct PairExample {
  Tokens a;
  Tokens b;
  int label = 0;
  std::optional<double> score;  // positives only
  std::string source_id;
  // Sentence indices within the article (positives: a indexes the abstract).
  std::size_t a_index = 0;
  std::size_t b_index = 0;

  bool operator==(const PairExample&) const = default;
};

inline constexpr double kDefaultPairThreshold = 0.25;

// mean(R-1 F, R-2 F, R-L F) of `source` against the single reference
// `summary`, punctuation tokens removed.
double averaged_rouge_f(const Tokens& source, const Tokens& summary, bool stem = false);

// For each abstract sentence, the article sentence with the highest averaged
// ROUGE F (lowest index on ties); emitted iff the score is >= threshold.
std::vector<PairExample> extract_positive_pairs(const std::vector<Tokens>& article,
                                                const std::vector<Tokens>& abstract, double threshold,
                                                std::string_view source_id = "", bool stem = false);

struct NegativeSample {
  std::vector<PairExample> pairs;
  bool exhausted = false;  // count exceeded C(n, 2); every pair was emitted
};

// `count` distinct unordered index pairs (i < j) drawn without replacement.
NegativeSample sample_negative_pairs(const std::vector<Tokens>& article, std::size_t count, std::uint64_t seed,
                                     std::string_view source_id = "");

struct Article {
  std::string id;
  std::vector<Tokens> article;
  std::vector<Tokens> abstract;
};

struct PairMiningConfig {
  double threshold = kDefaultPairThreshold;
  std::uint64_t seed = 0;
  bool stem = false;
  double negatives_per_positive = 1.0;
};

struct PairMiningStats {
  std::size_t articles = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<std::string> warnings;
};

// Per-article generator seed: global seed XOR FNV-1a of the article id.
std::uint64_t article_seed(std::uint64_t global_seed, std::string_view article_id);

std::vector<PairExample> mine_pairs(const std::vector<Article>& articles, const PairMiningConfig& config,
                                    PairMiningStats* stats = nullptr);

// {"id", "article": [sentences], "abstract": [sentences]} per line.
std::vector<Article> parse_articles_jsonl(std::string_view text, std::string_view source = "<memory>");

// {"a", "b", "label", "score"?, "source_id"} per line; a and b are token arrays.
std::string format_pairs_jsonl(const std::vector<PairExample>& pairs);
std::vector<PairExample> parse_pairs_jsonl(std::string_view text, std::string_view source = "<memory>");

}  // namespace dppsum

#endif  // DPPSUM_PAIRGEN_HPP
