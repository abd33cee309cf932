#include "dppsum/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dppsum/corpus.hpp"
#include "dppsum/errors.hpp"

namespace dppsum {
namespace {

constexpr int kMaxRepairRounds = 200;
constexpr double kFileRangeSlack = 1e-6;

void require_square_finite(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols())
    throw ValidationError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected square");
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": matrix has non-finite entries");
}

// Symmetrize, clamp, unit diagonal. Exact symmetry is kept by writing both
// triangles from the same value.
Eigen::MatrixXd repair_entries(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::clamp(0.5 * (m(i, j) + m(j, i)), 0.0, 1.0);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string check_similarity_invariants(const Eigen::MatrixXd& values) {
  if (values.rows() != values.cols()) return "matrix is not square";
  const Eigen::Index n = values.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values(i, i) != 1.0) return "diagonal entry " + std::to_string(i) + " is not 1";
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = values(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        return "entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside [0,1]";
      if (v != values(j, i))
        return "entry (" + std::to_string(i) + "," + std::to_string(j) + ") breaks symmetry";
    }
  }
  return {};
}

SimilarityMatrix::SimilarityMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (auto problem = check_similarity_invariants(values_); !problem.empty())
    throw ValidationError("similarity matrix: " + problem);
}

SimilarityMatrix SimilarityMatrix::repaired(const Eigen::MatrixXd& raw) {
  require_square_finite(raw, "similarity matrix");
  return SimilarityMatrix(repair_entries(raw));
}

SimilarityMatrix SimilarityMatrix::identity(Eigen::Index n) {
  return SimilarityMatrix(Eigen::MatrixXd::Identity(n, n));
}

SimilarityMatrix cosine_matrix(const std::vector<TfIdfVector>& vectors) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::clamp(dot(vectors[static_cast<std::size_t>(i)], vectors[static_cast<std::size_t>(j)]), 0.0, 1.0);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return SimilarityMatrix(std::move(m));
}

SimilarityMatrix combine(const SimilarityMatrix& cos, const SimilarityMatrix& caps, double lambda_c) {
  if (cos.n() != caps.n())
    throw ValidationError("combine: cosine matrix is " + std::to_string(cos.n()) +
                          "x" + std::to_string(cos.n()) + " but capsule matrix is " +
                          std::to_string(caps.n()) + "x" + std::to_string(caps.n()));
  if (!(lambda_c >= 0.0 && lambda_c <= 1.0))
    throw ValidationError("combine: lambda_c must lie in [0,1], got " + format_double(lambda_c));
  if (lambda_c == 0.0) return cos;
  if (lambda_c == 1.0) return caps;
  const Eigen::MatrixXd mixed = (1.0 - lambda_c) * cos.values() + lambda_c * caps.values();
  return SimilarityMatrix(repair_entries(mixed));
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return solver.eigenvalues().minCoeff();
}

SimilarityMatrix project_psd(const Eigen::MatrixXd& symmetric, double eps) {
  require_square_finite(symmetric, "project_psd");
  const Eigen::Index n = symmetric.rows();
  Eigen::MatrixXd m = 0.5 * (symmetric + symmetric.transpose());
  if (check_similarity_invariants(m).empty() && min_eigenvalue(m) >= -eps)
    return SimilarityMatrix(std::move(m));

  for (int round = 0; round < kMaxRepairRounds; ++round) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw NumericalError("project_psd: eigendecomposition failed");
    const Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd& v = solver.eigenvectors();
    Eigen::MatrixXd psd = v * clipped.asDiagonal() * v.transpose();

    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i)
      inv_sqrt(i) = psd(i, i) > 0.0 ? 1.0 / std::sqrt(psd(i, i)) : 0.0;
    psd = inv_sqrt.asDiagonal() * psd * inv_sqrt.asDiagonal();

    m = repair_entries(psd);
    if (min_eigenvalue(m) >= -eps) return SimilarityMatrix(std::move(m));
  }
  throw NumericalError("project_psd: no PSD repair within " + std::to_string(kMaxRepairRounds) +
                       " rounds (min eigenvalue " + format_double(min_eigenvalue(m)) + ")");
}

SimilarityMatrix project_psd(const SimilarityMatrix& s, double eps) { return project_psd(s.values(), eps); }

void write_file_atomically(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

HeatmapPaths emit_heatmap(const SimilarityMatrix& s, const std::filesystem::path& base, Eigen::Index max_n) {
  if (max_n < 1) throw ValidationError("emit_heatmap: max_n must be >= 1");
  const Eigen::Index k = std::min(s.n(), max_n);
  std::ostringstream csv;
  std::ostringstream pgm;
  pgm << "P2\n" << k << ' ' << k << "\n255\n";
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j) {
        csv << ',';
        pgm << ' ';
      }
      csv << format_double(s(i, j));
      pgm << std::lround(255.0 * s(i, j));
    }
    csv << '\n';
    pgm << '\n';
  }
  HeatmapPaths paths{base, base};
  paths.csv += ".csv";
  paths.pgm += ".pgm";
  write_file_atomically(paths.csv, csv.str());
  write_file_atomically(paths.pgm, pgm.str());
  return paths;
}

SimilarityFile parse_similarity_file(std::string_view text, std::string_view source) {
  const std::string src(source);
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError(src + ":1: empty similarity file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  constexpr std::string_view kN = "n=";
  constexpr std::string_view kTopic = " topic=";
  const auto topic_pos = line.find(kTopic);
  if (line.rfind(kN, 0) != 0 || topic_pos == std::string::npos)
    throw ParseError(src + ":1: header must read 'n=<N> topic=<topic_id>'");
  long long n = -1;
  const char* nb = line.data() + kN.size();
  const char* ne = line.data() + topic_pos;
  auto [ptr, ec] = std::from_chars(nb, ne, n);
  if (ec != std::errc() || ptr != ne || n < 0) throw ParseError(src + ":1: field n: not a non-negative integer");

  SimilarityFile out;
  out.topic_id = line.substr(topic_pos + kTopic.size());
  Eigen::MatrixXd m(n, n);
  for (long long i = 0; i < n; ++i) {
    const std::string where = src + ":" + std::to_string(i + 2);
    if (!std::getline(in, line)) throw ParseError(where + ": expected row " + std::to_string(i) + ", got end of file");
    std::istringstream row(line);
    std::string cell;
    long long j = 0;
    while (row >> cell) {
      if (j >= n) throw ParseError(where + ": more than " + std::to_string(n) + " values");
      double v = 0.0;
      auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (r.ec != std::errc() || r.ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw ParseError(where + ": column " + std::to_string(j + 1) + ": '" + cell + "' is not a finite number");
      if (v < -kFileRangeSlack || v > 1.0 + kFileRangeSlack)
        throw ValidationError(where + ": column " + std::to_string(j + 1) + ": value " + cell + " outside [0,1]");
      m(i, j++) = v;
    }
    if (j != n) throw ParseError(where + ": expected " + std::to_string(n) + " values, got " + std::to_string(j));
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      throw ParseError(src + ": trailing content after " + std::to_string(n) + " rows");
  }
  out.matrix = SimilarityMatrix::repaired(m);
  return out;
}

SimilarityFile read_similarity_file(const std::filesystem::path& path) {
  return parse_similarity_file(read_text_file(path), path.string());
}

std::string format_similarity_file(const SimilarityMatrix& s, std::string_view topic_id) {
  std::ostringstream out;
  out << "n=" << s.n() << " topic=" << topic_id << '\n';
  for (Eigen::Index i = 0; i < s.n(); ++i) {
    for (Eigen::Index j = 0; j < s.n(); ++j) {
      if (j) out << ' ';
      out << format_double(s(i, j));
    }
    out << '\n';
  }
  return out.str();
}

void write_similarity_file(const SimilarityMatrix& s, std::string_view topic_id,
                           const std::filesystem::path& path) {
  write_file_atomically(path, format_similarity_file(s, topic_id));
}

}  // namespace dppsum
