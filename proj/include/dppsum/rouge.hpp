#ifndef DPPSUM_ROUGE_HPP
#define DPPSUM_ROUGE_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "dppsum/corpus.hpp"

namespace dppsum {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const RougeScore&) const = default;
};

struct RougeOptions {
  bool stem = false;                         // Porter-stem every token first
  std::optional<std::size_t> length_limit;  // truncate the candidate to this many tokens
};

// 2PR / (P + R), or 0 when P + R == 0.
double f_measure(double precision, double recall);

// Clipped n-gram overlap (n in {1, 2}); the reference with the best F wins.
RougeScore rouge_n(const Tokens& candidate, const std::vector<Tokens>& references, int n,
                   const RougeOptions& options = {});

// Unigrams plus skip bigrams (i < j, j - i <= max_gap), clipped, best F over
// references. rouge_su4 fixes max_gap = 4.
RougeScore rouge_su(const Tokens& candidate, const std::vector<Tokens>& references, std::size_t max_gap,
                    const RougeOptions& options = {});
RougeScore rouge_su4(const Tokens& candidate, const std::vector<Tokens>& references,
                     const RougeOptions& options = {});

// LCS-based P = LCS/|candidate|, R = LCS/|reference|, best F over references.
RougeScore rouge_l(const Tokens& candidate, const std::vector<Tokens>& references,
                   const RougeOptions& options = {});

}  // namespace dppsum

#endif  // DPPSUM_ROUGE_HPP
