#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arcd/core.hpp"
#include "arcd/data.hpp"
#include "arcd/runner.hpp"

namespace arcd {

/// `--synth n,m,cond,noise[,nnz]`: dense planted regression (or a
/// classification set under the logistic loss); with nnz, sparse rows.
/// `--synth breast-cancer` selects the breast-cancer stand-in.
struct SynthSpec {
  bool breast_cancer = false;
  std::size_t n = 0;
  std::size_t m = 0;
  double condition = 1.0;
  double noise = 0.0;
  std::size_t nnz = 0;  // 0: dense

  static SynthSpec parse(const std::string& text);
  std::string to_string() const;
};

struct DataSpec {
  std::string path;
  std::string format = "csv";  // csv | libsvm
  int label_column = -1;
  bool header = false;
  std::optional<std::size_t> cols;  // libsvm feature count override
  Normalization normalization = Normalization::None;
  std::optional<SynthSpec> synth;
  std::uint64_t data_seed = 1;
};

/// Loads or generates the dataset, remaps labels for the logistic loss and
/// normalizes.
std::shared_ptr<const Dataset> load_data(const DataSpec& spec, LossKind loss);

struct ExperimentSpec {
  RunConfig base;  // algorithm and seed are overridden per run
  std::vector<Algorithm> algorithms{Algorithm::Oarcd};
  std::vector<std::uint64_t> seeds{1};
  DataSpec data;
  std::filesystem::path out_dir = "arcd_out";
  std::size_t workers = 0;  // 0: hardware concurrency
  std::vector<std::string> argv;  // echoed into trace metadata for reruns
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::Oarcd;
  std::vector<std::int64_t> t;
  std::vector<double> mean;
  std::vector<double> stdev;
  std::vector<double> mean_strict;
  std::vector<double> stdev_strict;
  std::optional<double> accuracy;  // mean online accuracy (logistic)
};

struct ExperimentResult {
  std::vector<RunTrace> traces;  // ordered by (algorithm, seed)
  std::vector<AlgorithmSummary> summaries;
  std::vector<std::filesystem::path> trace_files;
  std::vector<std::filesystem::path> summary_files;
  std::filesystem::path plot_file;
};

/// One trace per (algorithm, seed) plus per-algorithm seed averages and a
/// combined plot-data file under `spec.out_dir`.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Seed-averaged metric per emitted row; traces must share the row grid.
AlgorithmSummary summarize(Algorithm algorithm,
                           const std::vector<const RunTrace*>& traces);

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

struct TraceMetadata {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
  }
  std::optional<std::string> get(const std::string& key) const;
};

inline constexpr const char* kTraceHeader =
    "t,loss,cumulative_loss,loss_strict,cumulative_strict,objective,metric,"
    "metric_strict,coords_touched";

TraceMetadata trace_metadata(const RunTrace& trace, const DataSpec& data,
                             const std::vector<std::string>& argv);

/// `#`-prefixed metadata block, then the CSV body. Per-row wall-clock goes to
/// a sibling `.timing.csv` so the body stays deterministic.
void write_trace(const RunTrace& trace, const TraceMetadata& meta,
                 const std::filesystem::path& path);

/// Metadata lines of a trace file, in order.
TraceMetadata read_trace_metadata(const std::filesystem::path& path);

/// The file without its metadata block.
std::string read_trace_body(const std::filesystem::path& path);

/// Columns t, then `<algo>_mean,<algo>_std` per algorithm.
void emit_plotdata(const std::vector<AlgorithmSummary>& summaries,
                   const std::filesystem::path& path);

std::string format_number(double v);
std::string version_string();

}  // namespace arcd
