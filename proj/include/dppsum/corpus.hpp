#ifndef DPPSUM_CORPUS_HPP
#define DPPSUM_CORPUS_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dppsum {

using Tokens = std::vector<std::string>;

// One element of a cluster's ground set.
struct Sentence {
  std::size_t id = 0;        // index into the ground set, 0..N-1
  std::string doc_id;
  std::size_t position = 0;  // 0-based index within its document
  Tokens tokens;
  std::string raw;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::size_t> sentence_ids;  // ground-set ids, in order

  bool operator==(const Document&) const = default;
};

struct Cluster {
  std::string topic_id;
  std::vector<Document> documents;
  std::vector<Sentence> sentences;  // flattened ground set
  std::vector<Tokens> references;   // one token list per reference summary

  std::size_t size() const { return sentences.size(); }
  bool operator==(const Cluster&) const = default;
};

// Lowercases ASCII letters, splits on whitespace and detaches leading and
// trailing characters from .,!?;:"'() as single-character tokens. Interior
// punctuation ("u.s.-led") is kept.
Tokens tokenize(std::string_view text);

// True for tokens made only of punctuation characters.
bool is_punctuation_token(std::string_view token);

// Drops punctuation-only tokens.
Tokens content_tokens(const Tokens& tokens);

std::string join_tokens(const Tokens& tokens);

// Parses the cluster JSON format. `source` is used in error messages.
Cluster parse_cluster(std::string_view json_text, std::string_view source = "<memory>");

Cluster load_cluster(const std::filesystem::path& path);

// Every *.json file under `dir`, sorted by filename.
std::vector<std::filesystem::path> list_cluster_files(const std::filesystem::path& dir);

// Throws ValidationError unless ids form a bijection onto 0..N-1, tokens are
// non-empty and every doc_id resolves.
void validate_cluster(const Cluster& cluster);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace dppsum

#endif  // DPPSUM_CORPUS_HPP
