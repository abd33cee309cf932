#include "dppsum/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "dppsum/errors.hpp"
#include "json.hpp"

namespace dppsum {
namespace {

using nlohmann::json;

constexpr std::string_view kDetachable = ".,!?;:\"'()";

bool is_detachable(char c) { return kDetachable.find(c) != std::string_view::npos; }

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

void split_chunk(std::string_view chunk, Tokens& out) {
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && is_detachable(chunk[begin])) {
    out.emplace_back(1, chunk[begin]);
    ++begin;
  }
  std::size_t core_end = end;
  while (core_end > begin && is_detachable(chunk[core_end - 1])) --core_end;
  if (core_end > begin) {
    std::string core;
    core.reserve(core_end - begin);
    for (std::size_t i = begin; i < core_end; ++i) core.push_back(ascii_lower(chunk[i]));
    out.push_back(std::move(core));
  }
  for (std::size_t i = core_end; i < end; ++i) out.emplace_back(1, chunk[i]);
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& value, const std::string& field) {
  if (!value.is_string()) throw ParseError(field + ": expected string");
  return value.get<std::string>();
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) split_chunk(text.substr(i, j - i), out);
    i = j;
  }
  return out;
}

bool is_punctuation_token(std::string_view token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(), [](char c) {
           auto u = static_cast<unsigned char>(c);
           return u < 0x80 && !std::isalnum(u);
         });
}

Tokens content_tokens(const Tokens& tokens) {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!is_punctuation_token(t)) out.push_back(t);
  return out;
}

std::string join_tokens(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Cluster parse_cluster(std::string_view json_text, std::string_view source) {
  const std::string src(source);
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(src + ":" + std::to_string(line_of_offset(json_text, e.byte)) +
                     ": malformed JSON (" + e.what() + ")");
  }
  if (!root.is_object()) throw ParseError(src + ": top level must be an object");

  Cluster cluster;
  cluster.topic_id = require_string(require(root, "topic_id", src), src + ": topic_id");

  const json& docs = require(root, "documents", src);
  if (!docs.is_array()) throw ParseError(src + ": documents: expected array");
  if (docs.empty()) throw ValidationError(src + ": documents: cluster has no documents");

  std::set<std::string> seen_docs;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const std::string where = src + ": documents[" + std::to_string(d) + "]";
    if (!docs[d].is_object()) throw ParseError(where + ": expected object");
    Document doc;
    doc.doc_id = require_string(require(docs[d], "doc_id", where), where + ".doc_id");
    if (!seen_docs.insert(doc.doc_id).second)
      throw ValidationError(where + ".doc_id: duplicate document id '" + doc.doc_id + "'");
    const json& sents = require(docs[d], "sentences", where);
    if (!sents.is_array()) throw ParseError(where + ".sentences: expected array");
    std::size_t position = 0;
    for (std::size_t s = 0; s < sents.size(); ++s) {
      std::string raw =
          require_string(sents[s], where + ".sentences[" + std::to_string(s) + "]");
      Tokens tokens = tokenize(raw);
      if (tokens.empty()) continue;
      Sentence sentence;
      sentence.id = cluster.sentences.size();
      sentence.doc_id = doc.doc_id;
      sentence.position = position++;
      sentence.tokens = std::move(tokens);
      sentence.raw = std::move(raw);
      doc.sentence_ids.push_back(sentence.id);
      cluster.sentences.push_back(std::move(sentence));
    }
    cluster.documents.push_back(std::move(doc));
  }

  if (auto it = root.find("references"); it != root.end()) {
    if (!it->is_array()) throw ParseError(src + ": references: expected array");
    for (std::size_t r = 0; r < it->size(); ++r) {
      const json& ref = (*it)[r];
      const std::string where = src + ": references[" + std::to_string(r) + "]";
      if (!ref.is_array()) throw ParseError(where + ": expected array of sentences");
      Tokens tokens;
      for (std::size_t s = 0; s < ref.size(); ++s) {
        Tokens part = tokenize(require_string(ref[s], where + "[" + std::to_string(s) + "]"));
        tokens.insert(tokens.end(), part.begin(), part.end());
      }
      cluster.references.push_back(std::move(tokens));
    }
  }

  validate_cluster(cluster);
  return cluster;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return buf.str();
}

Cluster load_cluster(const std::filesystem::path& path) {
  return parse_cluster(read_text_file(path), path.string());
}

std::vector<std::filesystem::path> list_cluster_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void validate_cluster(const Cluster& cluster) {
  std::set<std::string> doc_ids;
  for (const auto& d : cluster.documents) doc_ids.insert(d.doc_id);
  for (std::size_t i = 0; i < cluster.sentences.size(); ++i) {
    const Sentence& s = cluster.sentences[i];
    if (s.id != i)
      throw ValidationError("cluster '" + cluster.topic_id + "': sentence ids are not 0..N-1 (slot " +
                            std::to_string(i) + " holds id " + std::to_string(s.id) + ")");
    if (s.tokens.empty())
      throw ValidationError("cluster '" + cluster.topic_id + "': sentence " + std::to_string(i) +
                            " has no tokens");
    if (!doc_ids.count(s.doc_id))
      throw ValidationError("cluster '" + cluster.topic_id + "': sentence " + std::to_string(i) +
                            " refers to unknown document '" + s.doc_id + "'");
  }
}

}  // namespace dppsum
