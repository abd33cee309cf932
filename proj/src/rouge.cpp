#include "dppsum/rouge.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "dppsum/errors.hpp"
#include "dppsum/porter_stemmer.hpp"
#include "dppsum/training.hpp"

namespace dppsum {
namespace {

using Counts = std::map<std::string, std::size_t>;

constexpr char kSep = '\x1f';

Tokens prepare(const Tokens& tokens, const RougeOptions& options, bool is_candidate) {
  Tokens out = tokens;
  if (is_candidate && options.length_limit && out.size() > *options.length_limit)
    out.resize(*options.length_limit);
  if (options.stem)
    for (auto& t : out) t = porter_stem(t);
  return out;
}

Counts ngram_counts(const Tokens& tokens, int n) {
  Counts counts;
  const auto len = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < len; ++k) {
      key.push_back(kSep);
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

Counts skip_unigram_counts(const Tokens& tokens, std::size_t max_gap) {
  Counts counts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    ++counts[tokens[i]];
    for (std::size_t j = i + 1; j < tokens.size() && j - i <= max_gap; ++j)
      ++counts[tokens[i] + kSep + tokens[j]];
  }
  return counts;
}

std::size_t total(const Counts& c) {
  std::size_t s = 0;
  for (const auto& [k, v] : c) s += v;
  return s;
}

std::size_t clipped_overlap(const Counts& cand, const Counts& ref) {
  std::size_t s = 0;
  for (const auto& [k, v] : cand) {
    auto it = ref.find(k);
    if (it != ref.end()) s += std::min(v, it->second);
  }
  return s;
}

RougeScore score_from(std::size_t overlap, std::size_t cand_total, std::size_t ref_total) {
  RougeScore s;
  s.precision = cand_total ? static_cast<double>(overlap) / static_cast<double>(cand_total) : 0.0;
  s.recall = ref_total ? static_cast<double>(overlap) / static_cast<double>(ref_total) : 0.0;
  s.f1 = f_measure(s.precision, s.recall);
  return s;
}

template <typename PerReference>
RougeScore best_over_references(const std::vector<Tokens>& references, const RougeOptions& options,
                                PerReference&& per_reference) {
  if (references.empty()) throw ValidationError("ROUGE: at least one reference is required");
  RougeScore best;
  bool first = true;
  for (const auto& ref : references) {
    const RougeScore s = per_reference(prepare(ref, options, false));
    if (first || s.f1 > best.f1) {
      best = s;
      first = false;
    }
  }
  return best;
}

template <typename Counter>
RougeScore count_based(const Tokens& candidate, const std::vector<Tokens>& references,
                       const RougeOptions& options, Counter&& counter) {
  const Counts cand = counter(prepare(candidate, options, true));
  const std::size_t cand_total = total(cand);
  return best_over_references(references, options, [&](const Tokens& ref) {
    const Counts r = counter(ref);
    return score_from(clipped_overlap(cand, r), cand_total, total(r));
  });
}

}  // namespace

double f_measure(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

RougeScore rouge_n(const Tokens& candidate, const std::vector<Tokens>& references, int n,
                   const RougeOptions& options) {
  if (n != 1 && n != 2) throw ValidationError("rouge_n: n must be 1 or 2, got " + std::to_string(n));
  return count_based(candidate, references, options, [n](const Tokens& t) { return ngram_counts(t, n); });
}

RougeScore rouge_su(const Tokens& candidate, const std::vector<Tokens>& references, std::size_t max_gap,
                    const RougeOptions& options) {
  return count_based(candidate, references, options,
                     [max_gap](const Tokens& t) { return skip_unigram_counts(t, max_gap); });
}

RougeScore rouge_su4(const Tokens& candidate, const std::vector<Tokens>& references,
                     const RougeOptions& options) {
  return rouge_su(candidate, references, 4, options);
}

RougeScore rouge_l(const Tokens& candidate, const std::vector<Tokens>& references,
                   const RougeOptions& options) {
  const Tokens cand = prepare(candidate, options, true);
  return best_over_references(references, options, [&](const Tokens& ref) {
    return score_from(lcs_length(cand, ref), cand.size(), ref.size());
  });
}

}  // namespace dppsum
