#include "dppsum/pairgen.hpp"

#include <random>
#include <sstream>
#include <utility>

#include "dppsum/errors.hpp"
#include "dppsum/rouge.hpp"
#include "json.hpp"

namespace dppsum {
namespace {

using nlohmann::json;

std::vector<Tokens> sentence_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected array of sentences");
  std::vector<Tokens> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw ParseError(where + "[" + std::to_string(i) + "]: expected string");
    Tokens t = tokenize(j[i].get<std::string>());
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

Tokens token_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected array of tokens");
  Tokens out;
  for (const auto& t : j) {
    if (!t.is_string()) throw ParseError(where + ": tokens must be strings");
    out.push_back(t.get<std::string>());
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line, line_no);
    start = end + 1;
  }
}

json parse_line(std::string_view line, const std::string& where) {
  try {
    json j = json::parse(line.begin(), line.end());
    if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ParseError(where + ": malformed JSON (" + e.what() + ")");
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

}  // namespace

double averaged_rouge_f(const Tokens& source, const Tokens& summary, bool stem) {
  const Tokens cand = content_tokens(source);
  const std::vector<Tokens> refs{content_tokens(summary)};
  RougeOptions opts;
  opts.stem = stem;
  return (rouge_n(cand, refs, 1, opts).f1 + rouge_n(cand, refs, 2, opts).f1 + rouge_l(cand, refs, opts).f1) / 3.0;
}

std::vector<PairExample> extract_positive_pairs(const std::vector<Tokens>& article,
                                                const std::vector<Tokens>& abstract, double threshold,
                                                std::string_view source_id, bool stem) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ValidationError("extract_positive_pairs: threshold must lie in [0,1]");
  std::vector<PairExample> out;
  if (article.empty()) return out;
  for (std::size_t s = 0; s < abstract.size(); ++s) {
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < article.size(); ++i) {
      const double score = averaged_rouge_f(article[i], abstract[s], stem);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    if (best_score < threshold) continue;
    PairExample p;
    p.a = abstract[s];
    p.b = article[best];
    p.label = 1;
    p.score = best_score;
    p.source_id = std::string(source_id);
    p.a_index = s;
    p.b_index = best;
    out.push_back(std::move(p));
  }
  return out;
}

NegativeSample sample_negative_pairs(const std::vector<Tokens>& article, std::size_t count, std::uint64_t seed,
                                     std::string_view source_id) {
  const std::size_t n = article.size();
  if (n < 2) throw ValidationError("sample_negative_pairs: article needs at least 2 sentences, got " + std::to_string(n));

  std::vector<std::pair<std::size_t, std::size_t>> all;
  all.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) all.emplace_back(i, j);

  NegativeSample out;
  if (count > all.size()) {
    out.exhausted = true;
    count = all.size();
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, all.size() - 1);
    std::swap(all[k], all[pick(rng)]);
    PairExample p;
    p.a_index = all[k].first;
    p.b_index = all[k].second;
    p.a = article[p.a_index];
    p.b = article[p.b_index];
    p.label = 0;
    p.source_id = std::string(source_id);
    out.pairs.push_back(std::move(p));
  }
  return out;
}

std::uint64_t article_seed(std::uint64_t global_seed, std::string_view article_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : article_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return global_seed ^ h;
}

std::vector<PairExample> mine_pairs(const std::vector<Article>& articles, const PairMiningConfig& config,
                                    PairMiningStats* stats) {
  PairMiningStats local;
  std::vector<PairExample> out;
  for (const Article& art : articles) {
    ++local.articles;
    auto positives = extract_positive_pairs(art.article, art.abstract, config.threshold, art.id, config.stem);
    const auto wanted = static_cast<std::size_t>(config.negatives_per_positive * static_cast<double>(positives.size()) + 0.5);
    local.positives += positives.size();
    out.insert(out.end(), std::make_move_iterator(positives.begin()), std::make_move_iterator(positives.end()));
    if (wanted == 0) continue;
    if (art.article.size() < 2) {
      local.warnings.push_back("article '" + art.id + "': fewer than 2 sentences, no negatives sampled");
      continue;
    }
    auto negatives = sample_negative_pairs(art.article, wanted, article_seed(config.seed, art.id), art.id);
    if (negatives.exhausted)
      local.warnings.push_back("article '" + art.id + "': requested " + std::to_string(wanted) +
                               " negatives but only " + std::to_string(negatives.pairs.size()) + " pairs exist");
    local.negatives += negatives.pairs.size();
    out.insert(out.end(), std::make_move_iterator(negatives.pairs.begin()),
               std::make_move_iterator(negatives.pairs.end()));
  }
  if (stats) *stats = std::move(local);
  return out;
}

std::vector<Article> parse_articles_jsonl(std::string_view text, std::string_view source) {
  std::vector<Article> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const json j = parse_line(line, where);
    Article a;
    const json& id = field(j, "id", where);
    if (!id.is_string()) throw ParseError(where + ": id: expected string");
    a.id = id.get<std::string>();
    a.article = sentence_list(field(j, "article", where), where + ": article");
    a.abstract = sentence_list(field(j, "abstract", where), where + ": abstract");
    out.push_back(std::move(a));
  });
  return out;
}

std::string format_pairs_jsonl(const std::vector<PairExample>& pairs) {
  std::ostringstream out;
  for (const auto& p : pairs) {
    json j;
    j["a"] = p.a;
    j["b"] = p.b;
    j["label"] = p.label;
    if (p.score) j["score"] = *p.score;
    j["source_id"] = p.source_id;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::vector<PairExample> parse_pairs_jsonl(std::string_view text, std::string_view source) {
  std::vector<PairExample> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const json j = parse_line(line, where);
    PairExample p;
    p.a = token_list(field(j, "a", where), where + ": a");
    p.b = token_list(field(j, "b", where), where + ": b");
    const json& label = field(j, "label", where);
    if (!label.is_number_integer() || (label.get<int>() != 0 && label.get<int>() != 1))
      throw ParseError(where + ": label: expected 0 or 1");
    p.label = label.get<int>();
    if (auto it = j.find("score"); it != j.end()) {
      if (!it->is_number()) throw ParseError(where + ": score: expected number");
      p.score = it->get<double>();
    }
    const json& sid = field(j, "source_id", where);
    if (!sid.is_string()) throw ParseError(where + ": source_id: expected string");
    p.source_id = sid.get<std::string>();
    out.push_back(std::move(p));
  });
  return out;
}

}  // namespace dppsum
