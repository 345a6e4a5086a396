#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arcd/core.hpp"

namespace arcd {

enum class Normalization { None, UnitRow, MinMax };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view s);

/// Read-only view of one feature row; indices are sorted and unique.
struct RowView {
  std::span<const std::uint32_t> index;
  std::span<const double> value;

  std::size_t nnz() const { return index.size(); }
  double dot(std::span<const double> y) const;
  /// Entry k (zero when absent). O(log nnz) for sparse rows.
  double at(std::size_t k) const;
  double squared_norm() const;
};

/// Feature matrix in compressed-row form plus labels. Dense inputs are stored
/// with every column present, so `row(i).index[j] == j`.
class Dataset {
 public:
  Dataset() = default;

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  bool dense() const { return dense_; }

  RowView row(std::size_t i) const {
    const auto begin = offsets_[i];
    const auto count = offsets_[i + 1] - begin;
    return {std::span(indices_).subspan(begin, count),
            std::span(values_).subspan(begin, count)};
  }
  double label(std::size_t i) const { return labels_[i]; }
  std::span<const double> labels() const { return labels_; }

  Normalization normalization() const { return normalization_; }
  const std::string& provenance() const { return provenance_; }

  /// Copy with labels replaced.
  Dataset with_labels(std::vector<double> labels) const;

  friend class DatasetBuilder;
  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
  std::vector<double> labels_;
  bool dense_ = false;
  Normalization normalization_ = Normalization::None;
  std::string provenance_;
};

class DatasetBuilder {
 public:
  explicit DatasetBuilder(bool dense) { data_.dense_ = dense; }

  /// Sparse row; indices must be strictly increasing and zero entries are
  /// kept as given.
  DatasetBuilder& add_row(std::span<const std::uint32_t> index,
                          std::span<const double> value, double label);
  DatasetBuilder& add_dense_row(std::span<const double> value, double label);
  DatasetBuilder& set_cols(std::size_t n);
  DatasetBuilder& set_normalization(Normalization n);
  DatasetBuilder& set_provenance(std::string p);

  /// Validates (m >= 1, every index < n) and returns the dataset.
  Dataset build() &&;

 private:
  Dataset data_;
  std::size_t max_index_plus_one_ = 0;
};

/// Dense comma-separated file. `label_column` is 0-based; -1 selects the last
/// column. Parse errors name the 1-based line and column.
Dataset load_csv(const std::filesystem::path& path, int label_column = -1,
                 bool has_header = false);

/// `label idx:val idx:val ...` with 1-based indices and `#` comments.
/// The feature count is the largest index seen unless overridden.
Dataset load_libsvm(const std::filesystem::path& path,
                    std::optional<std::size_t> cols = std::nullopt);

void write_csv(const Dataset& data, const std::filesystem::path& path,
               bool header = false);
void write_libsvm(const Dataset& data, const std::filesystem::path& path);

Dataset normalize(const Dataset& data, Normalization mode);

/// Maps {0,1} labels to {-1,+1}; {-1,+1} pass through. Anything else is a
/// DataError.
Dataset to_binary_labels(const Dataset& data);

// ---------------------------------------------------------------------------
// Synthetic problems
// ---------------------------------------------------------------------------

struct SynthQuadratic {
  Dataset data;
  Vector planted;  // targets are <a_i, planted> + noise
};

/// Rows A = sqrt(m/n) Q diag(s) V^T with Q (m x n) orthonormal columns,
/// V orthogonal, and singular values s spaced geometrically from 1 down to
/// 1/condition. For m == n and condition 1 the rows are orthonormal.
SynthQuadratic synth_quadratic(std::size_t n, std::size_t m,
                               double condition, double noise,
                               std::uint64_t seed);

/// Linearly separable up to label noise: labels are
/// sign(<a_i, w> / |w| + noise * N(0,1)) in {-1,+1}, rows Gaussian.
Dataset synth_classification(std::size_t n, std::size_t m, double noise,
                             std::uint64_t seed);

/// Sparse rows with `nnz_per_row` distinct random columns out of n and a
/// regression target from a sparse planted model.
Dataset synth_sparse(std::size_t n, std::size_t m, std::size_t nnz_per_row,
                     double noise, std::uint64_t seed);

/// Stand-in for the scaled Wisconsin breast-cancer benchmark when the real
/// file is unavailable: 683 rows of 9 cytology-style scores. Each score is an
/// integer v in 1..10, stored as (v - 5.5) / 4.5 in [-1, 1]. About 35% of
/// rows are malignant (+1) with scores drawn high; benign rows (-1) score
/// mostly 1 to 3. A few rows per class are drawn from the other class's
/// profile so the set is not perfectly separable.
Dataset breast_cancer_standin(std::uint64_t seed = 1);

}  // namespace arcd
