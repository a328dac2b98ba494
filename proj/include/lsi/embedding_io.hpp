#ifndef LSI_EMBEDDING_IO_HPP
#define LSI_EMBEDDING_IO_HPP

#include <lsi/core.hpp>
#include <lsi/domain_geometry.hpp>
#include <lsi/imputation.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lsi {

/// Token -> vector map with a fixed dimension, kept in insertion order.
class EmbeddingTable {
 public:
  using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit EmbeddingTable(Index dim = 0);

  Index dim() const { return dim_; }
  Index size() const { return static_cast<Index>(tokens_.size()); }

  // Throws InputError on empty/whitespace-bearing tokens, duplicates, wrong length or
  // non-finite values.
  void add(std::string token, const Eigen::Ref<const VectorXd>& vector);

  std::optional<Index> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(Index i) const { return tokens_.at(static_cast<std::size_t>(i)); }
  Eigen::Map<const RowMajorMatrix> vectors() const {
    return {data_.data(), size(), dim_};
  }
  Eigen::Map<const Eigen::RowVectorXd> vector(Index i) const {
    return {data_.data() + i * dim_, dim_};
  }

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.dim_ == b.dim_ && a.tokens_ == b.tokens_ && a.data_ == b.data_;
  }

 private:
  Index dim_;
  std::vector<std::string> tokens_;
  std::vector<double> data_;
  std::unordered_map<std::string, Index> index_;
};

/// Reads word2vec-style text: an optional `m s` header, then `token v1 ... vs` per line.
EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

/// Writes the `m s` header and one line per token with 17 significant digits.
void write_embeddings(std::ostream& out, const EmbeddingTable& table);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

/// Domain matrix CSV: entity id followed by the feature values. A first line whose second
/// field is not numeric is treated as a header.
DomainMatrix read_domain_csv(std::istream& in);
DomainMatrix load_domain_csv(const std::filesystem::path& path);
void write_domain_csv(std::ostream& out, const DomainMatrix& X);

/// Same layout as the domain CSV; empty cells become NaN (missing).
ReturnsTable read_returns_csv(std::istream& in);
ReturnsTable load_returns_csv(const std::filesystem::path& path);

/// `entity,label` pairs; the first line is a header.
std::vector<std::pair<std::string, std::string>> read_labels_csv(std::istream& in);
std::vector<std::pair<std::string, std::string>> load_labels_csv(const std::filesystem::path& path);

/// Domain entities reordered so that the ones with known embeddings come first.
struct AlignedProblem {
  std::vector<std::string> order;
  std::vector<Index> source_rows;  // order[k] is row source_rows[k] of the input domain matrix
  DomainMatrix X;                  // rows in `order`
  MatrixXd Yp;                     // p x s known embeddings, rows in `order`
  Index p = 0;
  Index q = 0;
};

/// Stable partition of the domain entities into (present in table, absent).
AlignedProblem align(const DomainMatrix& X, const EmbeddingTable& table);

/// The input table followed by the q imputed rows of `result`, in alignment order.
EmbeddingTable merge_imputed(const EmbeddingTable& table, const AlignedProblem& problem,
                             const ImputationResult<double>& result);

std::vector<Index> inverse_permutation(const std::vector<Index>& perm);

// out.row(k) = M.row(perm[k])
template <typename Derived>
Matrix<typename Derived::Scalar> permute_rows(const Eigen::MatrixBase<Derived>& M,
                                              const std::vector<Index>& perm) {
  Matrix<typename Derived::Scalar> out(static_cast<Index>(perm.size()), M.cols());
  for (Index k = 0; k < out.rows(); ++k) out.row(k) = M.row(perm[k]);
  return out;
}

}  // namespace lsi

#endif  // LSI_EMBEDDING_IO_HPP
