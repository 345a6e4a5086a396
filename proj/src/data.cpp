#include "arcd/data.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string_view>
#include <unordered_set>

namespace arcd {

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::UnitRow: return "unit";
    case Normalization::MinMax: return "minmax";
  }
  return "?";
}

Normalization parse_normalization(std::string_view s) {
  if (s == "none") return Normalization::None;
  if (s == "unit") return Normalization::UnitRow;
  if (s == "minmax") return Normalization::MinMax;
  throw ConfigError("unknown normalization '" + std::string(s) + "'");
}

double RowView::dot(std::span<const double> y) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < index.size(); ++j) acc += value[j] * y[index[j]];
  return acc;
}

double RowView::at(std::size_t k) const {
  if (k < index.size() && index[k] == k) return value[k];  // dense fast path
  const auto it = std::lower_bound(index.begin(), index.end(), k);
  if (it == index.end() || *it != k) return 0.0;
  return value[static_cast<std::size_t>(it - index.begin())];
}

double RowView::squared_norm() const {
  double acc = 0.0;
  for (double v : value) acc += v * v;
  return acc;
}

Dataset Dataset::with_labels(std::vector<double> labels) const {
  if (labels.size() != rows()) {
    throw DataError("with_labels: expected " + std::to_string(rows()) +
                    " labels, got " + std::to_string(labels.size()));
  }
  Dataset copy = *this;
  copy.labels_ = std::move(labels);
  return copy;
}

// ---------------------------------------------------------------------------

DatasetBuilder& DatasetBuilder::add_row(std::span<const std::uint32_t> index,
                                        std::span<const double> value,
                                        double label) {
  if (index.size() != value.size()) {
    throw DataError("add_row: index/value length mismatch");
  }
  for (std::size_t j = 1; j < index.size(); ++j) {
    if (index[j] <= index[j - 1]) {
      throw DataError("row " + std::to_string(data_.rows() + 1) +
                      ": feature indices must be strictly increasing");
    }
  }
  if (!index.empty()) {
    max_index_plus_one_ =
        std::max<std::size_t>(max_index_plus_one_, index.back() + 1);
  }
  data_.indices_.insert(data_.indices_.end(), index.begin(), index.end());
  data_.values_.insert(data_.values_.end(), value.begin(), value.end());
  data_.offsets_.push_back(data_.values_.size());
  data_.labels_.push_back(label);
  return *this;
}

DatasetBuilder& DatasetBuilder::add_dense_row(std::span<const double> value,
                                              double label) {
  std::vector<std::uint32_t> index(value.size());
  std::iota(index.begin(), index.end(), 0U);
  return add_row(index, value, label);
}

DatasetBuilder& DatasetBuilder::set_cols(std::size_t n) {
  data_.cols_ = n;
  return *this;
}

DatasetBuilder& DatasetBuilder::set_normalization(Normalization n) {
  data_.normalization_ = n;
  return *this;
}

DatasetBuilder& DatasetBuilder::set_provenance(std::string p) {
  data_.provenance_ = std::move(p);
  return *this;
}

Dataset DatasetBuilder::build() && {
  if (data_.rows() == 0) throw DataError("dataset has no rows");
  if (data_.cols_ == 0) data_.cols_ = max_index_plus_one_;
  if (data_.cols_ == 0) throw DataError("dataset has no features");
  if (max_index_plus_one_ > data_.cols_) {
    throw DataError("feature index " + std::to_string(max_index_plus_one_) +
                    " exceeds feature count " + std::to_string(data_.cols_));
  }
  if (data_.dense_) {
    for (std::size_t i = 0; i < data_.rows(); ++i) {
      if (data_.row(i).nnz() != data_.cols_) {
        throw DataError("row " + std::to_string(i + 1) + " has " +
                        std::to_string(data_.row(i).nnz()) +
                        " features, expected " + std::to_string(data_.cols_));
      }
    }
  }
  return std::move(data_);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, int label_column,
                 bool has_header) {
  auto in = open_input(path);
  DatasetBuilder builder(/*dense=*/true);
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  std::vector<double> cells;
  std::vector<double> features;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    cells.clear();
    std::string_view rest(line);
    std::size_t col = 0;
    for (;;) {
      ++col;
      const auto comma = rest.find(',');
      const auto cell = rest.substr(0, comma);
      double v = 0.0;
      if (!parse_double(cell, v)) {
        throw DataError(path.string() + ": non-numeric cell '" +
                        std::string(trim(cell)) + "' at (" +
                        std::to_string(line_no) + "," + std::to_string(col) +
                        ")");
      }
      cells.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (columns == 0) {
      columns = cells.size();
      if (columns < 2) {
        throw DataError(path.string() +
                        ": need at least one feature and a label column");
      }
    } else if (cells.size() != columns) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) +
                      " has " + std::to_string(cells.size()) +
                      " columns, expected " + std::to_string(columns));
    }
    const int resolved = label_column < 0
                             ? static_cast<int>(columns) + label_column
                             : label_column;
    if (resolved < 0 || resolved >= static_cast<int>(columns)) {
      throw ConfigError("label column " + std::to_string(label_column) +
                        " out of range for " + std::to_string(columns) +
                        " columns");
    }
    features.clear();
    for (std::size_t c = 0; c < columns; ++c) {
      if (static_cast<int>(c) != resolved) features.push_back(cells[c]);
    }
    builder.add_dense_row(features, cells[static_cast<std::size_t>(resolved)]);
  }
  if (columns == 0) throw DataError(path.string() + ": empty file");
  builder.set_cols(columns - 1).set_provenance(path.string());
  return std::move(builder).build();
}

Dataset load_libsvm(const std::filesystem::path& path,
                    std::optional<std::size_t> cols) {
  auto in = open_input(path);
  DatasetBuilder builder(/*dense=*/false);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> value;
  auto fail = [&](const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                    what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
      rest = rest.substr(0, hash);
    }
    rest = trim(rest);
    if (rest.empty()) continue;
    index.clear();
    value.clear();
    double label = 0.0;
    bool first = true;
    while (!rest.empty()) {
      const auto space = rest.find_first_of(" \t");
      const auto token = rest.substr(0, space);
      rest = space == std::string_view::npos ? std::string_view{}
                                             : trim(rest.substr(space));
      if (first) {
        if (!parse_double(token, label)) {
          fail("bad label '" + std::string(token) + "'");
        }
        first = false;
        continue;
      }
      const auto colon = token.find(':');
      if (colon == std::string_view::npos ||
          token.find(':', colon + 1) != std::string_view::npos) {
        fail("malformed pair '" + std::string(token) + "'");
      }
      std::uint64_t idx = 0;
      const auto key = token.substr(0, colon);
      const auto [ptr, ec] =
          std::from_chars(key.data(), key.data() + key.size(), idx);
      if (ec != std::errc() || ptr != key.data() + key.size() || idx == 0 ||
          idx > std::numeric_limits<std::uint32_t>::max()) {
        fail("bad feature index in '" + std::string(token) + "'");
      }
      double v = 0.0;
      if (!parse_double(token.substr(colon + 1), v)) {
        fail("bad feature value in '" + std::string(token) + "'");
      }
      const auto zero_based = static_cast<std::uint32_t>(idx - 1);
      if (!index.empty() && zero_based <= index.back()) {
        fail("feature indices must be strictly increasing");
      }
      index.push_back(zero_based);
      value.push_back(v);
    }
    builder.add_row(index, value, label);
  }
  if (line_no == 0) throw DataError(path.string() + ": empty file");
  if (cols) builder.set_cols(*cols);
  builder.set_provenance(path.string());
  return std::move(builder).build();
}

void write_csv(const Dataset& data, const std::filesystem::path& path,
               bool header) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  const std::size_t n = data.cols();
  if (header) {
    for (std::size_t k = 0; k < n; ++k) out << "x" << k << ',';
    out << "label\n";
  }
  std::vector<double> dense(n);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    std::fill(dense.begin(), dense.end(), 0.0);
    const auto r = data.row(i);
    for (std::size_t j = 0; j < r.nnz(); ++j) dense[r.index[j]] = r.value[j];
    for (double v : dense) out << format_double(v) << ',';
    out << format_double(data.label(i)) << '\n';
  }
}

void write_libsvm(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (std::size_t i = 0; i < data.rows(); ++i) {
    out << format_double(data.label(i));
    const auto r = data.row(i);
    for (std::size_t j = 0; j < r.nnz(); ++j) {
      out << ' ' << (r.index[j] + 1) << ':' << format_double(r.value[j]);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

Dataset normalize(const Dataset& data, Normalization mode) {
  if (mode == Normalization::None) return data;
  const std::size_t n = data.cols();
  DatasetBuilder builder(data.dense());
  builder.set_cols(n).set_normalization(mode).set_provenance(
      data.provenance());
  std::vector<double> scaled;

  if (mode == Normalization::UnitRow) {
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const auto r = data.row(i);
      const double norm = std::sqrt(r.squared_norm());
      scaled.assign(r.value.begin(), r.value.end());
      if (norm > 0.0) {
        for (double& v : scaled) v /= norm;
      }
      builder.add_row(r.index, scaled, data.label(i));
    }
    return std::move(builder).build();
  }

  // min-max: implicit zeros of sparse rows take part in the range.
  std::vector<double> lo(n, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> present(n, 0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto r = data.row(i);
    for (std::size_t j = 0; j < r.nnz(); ++j) {
      const auto k = r.index[j];
      lo[k] = std::min(lo[k], r.value[j]);
      hi[k] = std::max(hi[k], r.value[j]);
      ++present[k];
    }
  }
  bool zero_maps_to_zero = true;
  for (std::size_t k = 0; k < n; ++k) {
    if (present[k] < data.rows()) {
      lo[k] = std::min(lo[k], 0.0);
      hi[k] = std::max(hi[k], 0.0);
    }
    if (lo[k] < 0.0 && hi[k] > lo[k]) zero_maps_to_zero = false;
  }
  auto map = [&](std::size_t k, double v) {
    const double range = hi[k] - lo[k];
    return range > 0.0 ? (v - lo[k]) / range : 0.0;
  };
  if (data.dense() || zero_maps_to_zero) {
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const auto r = data.row(i);
      scaled.resize(r.nnz());
      for (std::size_t j = 0; j < r.nnz(); ++j) {
        scaled[j] = map(r.index[j], r.value[j]);
      }
      builder.add_row(r.index, scaled, data.label(i));
    }
    return std::move(builder).build();
  }
  // Some implicit zero maps to a nonzero value: the result is dense.
  DatasetBuilder dense_builder(/*dense=*/true);
  dense_builder.set_cols(n).set_normalization(mode).set_provenance(
      data.provenance());
  std::vector<double> row(n);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    const auto r = data.row(i);
    for (std::size_t j = 0; j < r.nnz(); ++j) row[r.index[j]] = r.value[j];
    for (std::size_t k = 0; k < n; ++k) row[k] = map(k, row[k]);
    dense_builder.add_dense_row(row, data.label(i));
  }
  return std::move(dense_builder).build();
}

Dataset to_binary_labels(const Dataset& data) {
  std::vector<double> labels(data.labels().begin(), data.labels().end());
  const bool zero_one = std::all_of(labels.begin(), labels.end(), [](double v) {
    return v == 0.0 || v == 1.0;
  });
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double& v = labels[i];
    if (zero_one) {
      v = v == 0.0 ? -1.0 : 1.0;
    } else if (v != -1.0 && v != 1.0) {
      throw DataError("row " + std::to_string(i + 1) + ": label " +
                      format_double(v) +
                      " is not a class label in {0,1} or {-1,+1}");
    }
  }
  return data.with_labels(std::move(labels));
}

// ---------------------------------------------------------------------------
// Synthetic generators
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXd gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = rng.normal();
  }
  return out;
}

Eigen::MatrixXd orthonormal_columns(Rng& rng, std::size_t rows,
                                    std::size_t cols) {
  const Eigen::MatrixXd g = gaussian_matrix(rng, rows, cols);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  // Sign-fix so Q does not depend on Householder conventions.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace

SynthQuadratic synth_quadratic(std::size_t n, std::size_t m, double condition,
                               double noise, std::uint64_t seed) {
  if (n == 0 || m < n) {
    throw ConfigError("synth_quadratic: need n >= 1 and m >= n");
  }
  if (!(condition >= 1.0)) {
    throw ConfigError("synth_quadratic: condition number must be >= 1");
  }
  if (noise < 0.0) throw ConfigError("synth_quadratic: noise must be >= 0");
  Rng rng(derive_seed(seed, stream::kSynth));
  const Eigen::MatrixXd q = orthonormal_columns(rng, m, n);
  const Eigen::MatrixXd v = orthonormal_columns(rng, n, n);
  Eigen::VectorXd s(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(j) / (n - 1);
    s(j) = std::pow(condition, -frac);
  }
  const double scale = std::sqrt(static_cast<double>(m) / n);
  const Eigen::MatrixXd a = scale * q * s.asDiagonal() * v.transpose();

  SynthQuadratic out;
  out.planted.resize(n);
  for (auto& p : out.planted) p = rng.normal();
  DatasetBuilder builder(/*dense=*/true);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < m; ++i) {
    double target = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      row[k] = a(i, k);
      target += row[k] * out.planted[k];
    }
    if (noise > 0.0) target += noise * rng.normal();
    builder.add_dense_row(row, target);
  }
  std::ostringstream prov;
  prov << "synth_quadratic(n=" << n << ",m=" << m << ",cond=" << condition
       << ",noise=" << noise << ",seed=" << seed << ")";
  builder.set_cols(n).set_provenance(prov.str());
  out.data = std::move(builder).build();
  return out;
}

Dataset synth_classification(std::size_t n, std::size_t m, double noise,
                             std::uint64_t seed) {
  if (n == 0 || m == 0) {
    throw ConfigError("synth_classification: need n >= 1 and m >= 1");
  }
  Rng rng(derive_seed(seed, stream::kSynth));
  Vector w(n);
  double wn = 0.0;
  for (auto& v : w) {
    v = rng.normal();
    wn += v * v;
  }
  wn = std::sqrt(wn);
  DatasetBuilder builder(/*dense=*/true);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < m; ++i) {
    double margin = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      row[k] = rng.normal();
      margin += row[k] * w[k] / wn;
    }
    margin += noise * rng.normal();
    builder.add_dense_row(row, margin >= 0.0 ? 1.0 : -1.0);
  }
  std::ostringstream prov;
  prov << "synth_classification(n=" << n << ",m=" << m << ",noise=" << noise
       << ",seed=" << seed << ")";
  builder.set_cols(n).set_provenance(prov.str());
  return std::move(builder).build();
}

Dataset synth_sparse(std::size_t n, std::size_t m, std::size_t nnz_per_row,
                     double noise, std::uint64_t seed) {
  if (n == 0 || m == 0 || nnz_per_row == 0 || nnz_per_row > n) {
    throw ConfigError("synth_sparse: need 1 <= nnz_per_row <= n and m >= 1");
  }
  Rng rng(derive_seed(seed, stream::kSynth));
  Vector planted(n, 0.0);
  for (std::size_t k = 0; k < n; k += 10) planted[k] = rng.normal();
  DatasetBuilder builder(/*dense=*/false);
  std::vector<double> value;
  for (std::size_t i = 0; i < m; ++i) {
    // Floyd's sampling of distinct columns.
    std::vector<std::uint32_t> chosen;
    std::unordered_set<std::uint32_t> taken;
    chosen.reserve(nnz_per_row);
    for (std::size_t j = n - nnz_per_row; j < n; ++j) {
      auto t = static_cast<std::uint32_t>(rng.uniform_index(j + 1));
      if (!taken.insert(t).second) {
        t = static_cast<std::uint32_t>(j);
        taken.insert(t);
      }
      chosen.push_back(t);
    }
    std::sort(chosen.begin(), chosen.end());
    value.resize(chosen.size());
    double target = 0.0;
    for (std::size_t j = 0; j < chosen.size(); ++j) {
      value[j] = rng.normal();
      target += value[j] * planted[chosen[j]];
    }
    target += noise * rng.normal();
    builder.add_row(chosen, value, target);
  }
  std::ostringstream prov;
  prov << "synth_sparse(n=" << n << ",m=" << m << ",nnz=" << nnz_per_row
       << ",noise=" << noise << ",seed=" << seed << ")";
  builder.set_cols(n).set_provenance(prov.str());
  return std::move(builder).build();
}

Dataset breast_cancer_standin(std::uint64_t seed) {
  constexpr std::size_t kRows = 683;
  constexpr std::size_t kCols = 9;
  constexpr double kMalignantShare = 0.35;
  constexpr double kAtypicalShare = 0.03;
  Rng rng(derive_seed(seed, stream::kSynth));
  auto score = [&](bool high) {
    // Benign: 1 + geometric-ish tail; malignant: spread over 3..10.
    int v = 1;
    if (high) {
      v = 3 + static_cast<int>(rng.uniform_index(8));
      if (rng.uniform01() < 0.4) v = 10;
    } else {
      while (v < 10 && rng.uniform01() < 0.45) ++v;
    }
    return (static_cast<double>(v) - 5.5) / 4.5;
  };
  DatasetBuilder builder(/*dense=*/true);
  std::vector<double> row(kCols);
  for (std::size_t i = 0; i < kRows; ++i) {
    const bool malignant = rng.uniform01() < kMalignantShare;
    const bool atypical = rng.uniform01() < kAtypicalShare;
    const bool high = malignant != atypical;
    for (auto& v : row) v = score(high);
    builder.add_dense_row(row, malignant ? 1.0 : -1.0);
  }
  builder.set_cols(kCols).set_provenance("breast_cancer_standin(seed=" +
                                         std::to_string(seed) + ")");
  return std::move(builder).build();
}

}  // namespace arcd
