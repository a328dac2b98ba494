#include <lsi/embedding_io.hpp>
#include <lsi/format.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace lsi {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_count(std::string_view text, Index& out) {
  if (text.empty()) return false;
  Index value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

// Shared reader for the domain and returns CSV layouts.
template <typename CellParser>
void read_id_rows(std::istream& in, std::vector<std::string>& ids, std::vector<double>& values,
                  Index& width, CellParser parse_cell) {
  std::string line;
  std::size_t line_no = 0;
  width = -1;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_commas(view);
    if (first) {
      first = false;
      double probe = 0;
      if (fields.size() >= 2 && !fields[1].empty() && !parse_real(fields[1], probe)) continue;
    }
    if (fields.size() < 2) throw InputError(at_line(line_no) + "expected an id and at least one value");
    if (fields[0].empty()) throw InputError(at_line(line_no) + "empty entity id");
    const Index row_width = static_cast<Index>(fields.size()) - 1;
    if (width < 0) width = row_width;
    if (row_width != width) {
      throw InputError(at_line(line_no) + "expected " + std::to_string(width) + " values, found " +
                       std::to_string(row_width));
    }
    ids.emplace_back(fields[0]);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      values.push_back(parse_cell(fields[f], line_no));
    }
  }
  if (width < 0) width = 0;
}

MatrixXd to_matrix(const std::vector<double>& values, Index rows, Index cols) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, cols);
}

}  // namespace

EmbeddingTable::EmbeddingTable(Index dim) : dim_(dim) {
  if (dim < 0) throw InputError("embedding dimension must be non-negative");
}

void EmbeddingTable::add(std::string token, const Eigen::Ref<const VectorXd>& vector) {
  if (token.empty()) throw InputError("empty token");
  if (std::any_of(token.begin(), token.end(), is_space)) {
    throw InputError("token '" + token + "' contains whitespace and cannot be stored");
  }
  if (vector.size() != dim_) {
    throw InputError("token '" + token + "' has " + std::to_string(vector.size()) +
                     " values, expected " + std::to_string(dim_));
  }
  if (!vector.allFinite()) throw InputError("token '" + token + "' has non-finite values");
  if (index_.count(token) != 0) throw InputError("duplicate token '" + token + "'");
  index_.emplace(token, size());
  tokens_.push_back(std::move(token));
  data_.insert(data_.end(), vector.data(), vector.data() + vector.size());
}

std::optional<Index> EmbeddingTable::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingTable read_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<Index> declared_rows;
  Index dim = -1;
  std::vector<std::pair<std::string, VectorXd>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    Index m = 0;
    Index s = 0;
    if (line_no == 1 && fields.size() == 2 && parse_count(fields[0], m) && parse_count(fields[1], s)) {
      declared_rows = m;
      dim = s;
      continue;
    }
    const Index width = static_cast<Index>(fields.size()) - 1;
    if (dim < 0) dim = width;
    if (width != dim) {
      throw InputError(at_line(line_no) + "expected " + std::to_string(dim) + " values, found " +
                       std::to_string(width));
    }
    VectorXd v(dim);
    for (Index c = 0; c < dim; ++c) {
      if (!parse_real(fields[c + 1], v(c)) || !std::isfinite(v(c))) {
        throw InputError(at_line(line_no) + "invalid number '" + std::string(fields[c + 1]) + "'");
      }
    }
    rows.emplace_back(std::string(fields[0]), std::move(v));
  }

  EmbeddingTable table(std::max<Index>(dim, 0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (table.contains(rows[r].first)) {
      throw InputError("duplicate token '" + rows[r].first + "'");
    }
    table.add(std::move(rows[r].first), rows[r].second);
  }
  if (declared_rows && *declared_rows != table.size()) {
    throw InputError("header declares " + std::to_string(*declared_rows) + " vectors, file has " +
                     std::to_string(table.size()));
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_embeddings(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  for (Index i = 0; i < table.size(); ++i) {
    out << table.token(i);
    const auto v = table.vector(i);
    for (Index c = 0; c < table.dim(); ++c) out << ' ' << format_real(v(c));
    out << '\n';
  }
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_embeddings(out, table);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

DomainMatrix read_domain_csv(std::istream& in) {
  DomainMatrix X;
  std::vector<double> values;
  Index width = 0;
  read_id_rows(in, X.entities, values, width, [](std::string_view cell, std::size_t line_no) {
    double v = 0;
    if (!parse_real(cell, v)) {
      throw InputError(at_line(line_no) + "invalid number '" + std::string(cell) + "'");
    }
    return v;
  });
  X.data = to_matrix(values, static_cast<Index>(X.entities.size()), width);
  validate(X);
  return X;
}

DomainMatrix load_domain_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_domain_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_domain_csv(std::ostream& out, const DomainMatrix& X) {
  for (Index i = 0; i < X.size(); ++i) {
    out << X.entities[i];
    for (Index c = 0; c < X.dim(); ++c) out << ',' << format_real(X.data(i, c));
    out << '\n';
  }
}

ReturnsTable read_returns_csv(std::istream& in) {
  ReturnsTable R;
  std::vector<double> values;
  Index width = 0;
  read_id_rows(in, R.entities, values, width, [](std::string_view cell, std::size_t line_no) {
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    if (!parse_real(cell, v) || std::isnan(v)) {
      throw InputError(at_line(line_no) + "invalid number '" + std::string(cell) + "'");
    }
    return v;
  });
  R.values = to_matrix(values, static_cast<Index>(R.entities.size()), width);
  return R;
}

ReturnsTable load_returns_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_returns_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> read_labels_csv(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto fields = split_commas(view);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw InputError(at_line(line_no) + "expected 'entity,label'");
    }
    out.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> load_labels_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_labels_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

AlignedProblem align(const DomainMatrix& X, const EmbeddingTable& table) {
  validate(X);
  AlignedProblem problem;
  std::vector<Index> absent;
  std::vector<Index> table_rows;
  for (Index i = 0; i < X.size(); ++i) {
    if (const auto row = table.find(X.entities[i])) {
      problem.source_rows.push_back(i);
      table_rows.push_back(*row);
    } else {
      absent.push_back(i);
    }
  }
  problem.p = static_cast<Index>(problem.source_rows.size());
  problem.q = static_cast<Index>(absent.size());
  if (problem.p == 0) {
    throw InputError("no anchors: none of the domain entities has a known embedding");
  }
  problem.source_rows.insert(problem.source_rows.end(), absent.begin(), absent.end());

  for (Index r : problem.source_rows) problem.order.push_back(X.entities[r]);
  problem.X.entities = problem.order;
  problem.X.data = permute_rows(X.data, problem.source_rows);
  problem.Yp.resize(problem.p, table.dim());
  for (Index k = 0; k < problem.p; ++k) problem.Yp.row(k) = table.vector(table_rows[k]);
  return problem;
}

EmbeddingTable merge_imputed(const EmbeddingTable& table, const AlignedProblem& problem,
                             const ImputationResult<double>& result) {
  const Index n = problem.p + problem.q;
  if (result.Y.rows() != n || result.Y.cols() != table.dim()) {
    throw InputError("imputation result does not match the aligned problem");
  }
  EmbeddingTable merged = table;
  for (Index k = problem.p; k < n; ++k) {
    merged.add(problem.order[k], result.Y.row(k).transpose());
  }
  return merged;
}

std::vector<Index> inverse_permutation(const std::vector<Index>& perm) {
  std::vector<Index> inv(perm.size(), -1);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const Index target = perm[k];
    if (target < 0 || target >= static_cast<Index>(perm.size()) || inv[target] != -1) {
      throw InputError("not a permutation");
    }
    inv[target] = static_cast<Index>(k);
  }
  return inv;
}

}  // namespace lsi
