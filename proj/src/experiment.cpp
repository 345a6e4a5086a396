#include "arcd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "arcd/metrics.hpp"

#ifndef ARCD_VERSION
#define ARCD_VERSION "0.0.0"
#endif

namespace arcd {

std::string version_string() { return ARCD_VERSION; }

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------

SynthSpec SynthSpec::parse(const std::string& text) {
  if (text == "breast-cancer") {
    SynthSpec s;
    s.breast_cancer = true;
    return s;
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 4 && parts.size() != 5) {
    throw ConfigError("--synth expects n,m,cond,noise[,nnz], got '" + text + "'");
  }
  SynthSpec s;
  try {
    s.n = std::stoul(parts[0]);
    s.m = std::stoul(parts[1]);
    s.condition = std::stod(parts[2]);
    s.noise = std::stod(parts[3]);
    if (parts.size() == 5) s.nnz = std::stoul(parts[4]);
  } catch (const std::exception&) {
    throw ConfigError("--synth: cannot parse '" + text + "'");
  }
  return s;
}

std::string SynthSpec::to_string() const {
  if (breast_cancer) return "breast-cancer";
  std::string out = std::to_string(n) + "," + std::to_string(m) + "," +
                    format_number(condition) + "," + format_number(noise);
  if (nnz > 0) out += "," + std::to_string(nnz);
  return out;
}

std::shared_ptr<const Dataset> load_data(const DataSpec& spec, LossKind loss) {
  Dataset data;
  if (spec.synth) {
    const auto& s = *spec.synth;
    if (s.breast_cancer) {
      data = breast_cancer_standin(spec.data_seed);
    } else if (s.nnz > 0) {
      data = synth_sparse(s.n, s.m, s.nnz, s.noise, spec.data_seed);
      if (loss == LossKind::Logistic) {
        std::vector<double> labels(data.rows());
        for (std::size_t i = 0; i < labels.size(); ++i) {
          labels[i] = data.label(i) >= 0.0 ? 1.0 : -1.0;
        }
        data = data.with_labels(std::move(labels));
      }
    } else if (loss == LossKind::Logistic) {
      data = synth_classification(s.n, s.m, s.noise, spec.data_seed);
    } else {
      data = synth_quadratic(s.n, s.m, s.condition, s.noise, spec.data_seed).data;
    }
  } else {
    if (spec.path.empty()) throw ConfigError("no dataset: pass --data or --synth");
    if (spec.format == "csv") {
      data = load_csv(spec.path, spec.label_column, spec.header);
    } else if (spec.format == "libsvm") {
      data = spec.cols ? load_libsvm(spec.path, *spec.cols) : load_libsvm(spec.path);
    } else {
      throw ConfigError("unknown format '" + spec.format + "'");
    }
  }
  if (loss == LossKind::Logistic) data = to_binary_labels(data);
  return std::make_shared<const Dataset>(normalize(data, spec.normalization));
}

// ---------------------------------------------------------------------------

std::optional<std::string> TraceMetadata::get(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

TraceMetadata trace_metadata(const RunTrace& trace, const DataSpec& data,
                             const std::vector<std::string>& argv) {
  const RunConfig& c = trace.config;
  TraceMetadata meta;
  meta.add("version", version_string());
  meta.add("algo", std::string(to_string(c.algorithm)));
  meta.add("setting", std::string(to_string(trace.setting)));
  meta.add("regime", std::string(to_string(c.regime)));
  meta.add("loss", std::string(to_string(c.loss)));
  meta.add("T", std::to_string(c.horizon));
  meta.add("seed", std::to_string(c.seed));
  meta.add("mu", format_number(c.effective_mu()));
  meta.add("b", format_number(trace.b_used));
  meta.add("b_auto", c.auto_b ? "1" : "0");
  meta.add("alpha", format_number(c.alpha));
  meta.add("eta_c", format_number(c.eta_c));
  meta.add("emit_every", std::to_string(c.emit_cadence()));
  meta.add("lazy_rep", c.lazy ? "1" : "0");
  meta.add("diagnostics", c.diagnostics ? "1" : "0");
  meta.add("sample_mode", std::string(to_string(c.sample_mode())));
  if (data.synth) {
    meta.add("data", "synth:" + data.synth->to_string());
  } else {
    meta.add("data", data.path);
    meta.add("format", data.format);
    meta.add("label_col", std::to_string(data.label_column));
  }
  meta.add("data_seed", std::to_string(data.data_seed));
  meta.add("normalize", std::string(to_string(data.normalization)));
  meta.add("n", std::to_string(trace.n));
  meta.add("m", std::to_string(trace.m));
  meta.add("baseline_rule", c.regime == Regime::Strong ? "1/(mu t)" : "c/sqrt(t)");
  meta.add("measured.L", format_number(trace.measured.L));
  meta.add("measured.sigma", format_number(trace.measured.sigma));
  meta.add("measured.D", format_number(trace.measured.D));
  meta.add("measured.R", format_number(trace.measured.R));
  meta.add("measured.G", format_number(trace.measured.G));
  meta.add("comparator.method", trace.comparator.method);
  meta.add("comparator.gradient_norm",
           format_number(trace.comparator.gradient_norm));
  meta.add("comparator.iterations", std::to_string(trace.comparator.iterations));
  meta.add("comparator.min_norm_fallback",
           trace.comparator.min_norm_fallback ? "1" : "0");
  meta.add("comparator.tolerance", format_number(kLogisticTolerance));
  if (trace.setting == Setting::Stochastic) {
    meta.add("f_star", format_number(trace.f_star));
    meta.add("metric", "suboptimality");
  } else {
    meta.add("comparator_total", format_number(trace.comparator_total));
    meta.add("metric", "regret");
    meta.add("wrapped", trace.wrapped ? "1" : "0");
  }
  meta.add("step_ns_total", std::to_string(trace.step_ns));
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta.add("created", stamp);
  std::string joined;
  for (const auto& a : argv) {
    if (!joined.empty()) joined += ' ';
    joined += a;
  }
  meta.add("argv", joined);
  return meta;
}

void write_trace(const RunTrace& trace, const TraceMetadata& meta,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : meta.entries) out << "# " << k << " = " << v << '\n';
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows) {
    out << r.t << ',' << format_number(r.loss) << ','
        << format_number(r.cumulative_loss) << ',' << format_number(r.loss_strict)
        << ',' << format_number(r.cumulative_strict) << ','
        << format_number(r.objective) << ',' << format_number(r.metric) << ','
        << format_number(r.metric_strict) << ',' << r.coords_touched << '\n';
  }
  auto timing = path;
  timing.replace_extension(".timing.csv");
  std::ofstream tout(timing);
  if (!tout) throw ConfigError("cannot write '" + timing.string() + "'");
  tout << "t,wall_ns\n";
  for (std::size_t j = 0; j < trace.rows.size(); ++j) {
    tout << trace.rows[j].t << ',' << trace.row_wall_ns[j] << '\n';
  }
}

TraceMetadata read_trace_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  TraceMetadata meta;
  std::string line;
  while (std::getline(in, line) && line.starts_with("# ")) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    meta.add(line.substr(2, eq - 2), line.substr(eq + 3));
  }
  return meta;
}

std::string read_trace_body(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::string line;
  std::string body;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) continue;
    body += line;
    body += '\n';
  }
  return body;
}

// ---------------------------------------------------------------------------

AlgorithmSummary summarize(Algorithm algorithm,
                           const std::vector<const RunTrace*>& traces) {
  AlgorithmSummary s;
  s.algorithm = algorithm;
  if (traces.empty()) return s;
  const std::size_t rows = traces.front()->rows.size();
  for (const auto* tr : traces) {
    if (tr->rows.size() != rows) {
      throw ConfigError("summarize: traces have different row grids");
    }
  }
  const double k = static_cast<double>(traces.size());
  auto stats = [&](auto field, std::vector<double>& mean,
                   std::vector<double>& sd) {
    mean.resize(rows);
    sd.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (const auto* tr : traces) acc += field(tr->rows[r]);
      const double mu = acc / k;
      double var = 0.0;
      for (const auto* tr : traces) {
        const double d = field(tr->rows[r]) - mu;
        var += d * d;
      }
      mean[r] = mu;
      sd[r] = traces.size() > 1 ? std::sqrt(var / (k - 1.0)) : 0.0;
    }
  };
  s.t.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) s.t[r] = traces.front()->rows[r].t;
  stats([](const TraceRow& r) { return r.metric; }, s.mean, s.stdev);
  stats([](const TraceRow& r) { return r.metric_strict; }, s.mean_strict,
        s.stdev_strict);
  return s;
}

void emit_plotdata(const std::vector<AlgorithmSummary>& summaries,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << 't';
  for (const auto& s : summaries) {
    out << ',' << to_string(s.algorithm) << "_mean," << to_string(s.algorithm)
        << "_std";
  }
  out << '\n';
  if (summaries.empty()) return;
  const auto& grid = summaries.front().t;
  for (const auto& s : summaries) {
    if (s.t != grid) throw ConfigError("emit_plotdata: row grids differ");
  }
  for (std::size_t r = 0; r < grid.size(); ++r) {
    out << grid[r];
    for (const auto& s : summaries) {
      out << ',' << format_number(s.mean[r]) << ',' << format_number(s.stdev[r]);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.seeds.empty()) throw ConfigError("experiment needs at least one seed");
  if (spec.algorithms.empty()) {
    throw ConfigError("experiment needs at least one algorithm");
  }
  spec.base.validate();
  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec || !std::filesystem::is_directory(spec.out_dir)) {
    throw ConfigError("output directory '" + spec.out_dir.string() +
                      "' is not writable");
  }

  const auto data = load_data(spec.data, spec.base.loss);
  const LossModel loss(spec.base.loss, data, spec.base.effective_mu());

  // One comparator per protocol, shared by every run that uses it.
  std::map<Setting, ComparatorResult> comparators;
  for (Algorithm a : spec.algorithms) {
    RunConfig probe = spec.base;
    probe.algorithm = a;
    const Setting setting = probe.setting();
    if (comparators.contains(setting)) continue;
    if (setting == Setting::Stochastic) {
      comparators[setting] = comparator_full(loss);
    } else if (spec.base.horizon > 0) {
      comparators[setting] = comparator_for_rounds(
          loss, online_rounds(data->rows(), spec.base.horizon));
    }
  }

  struct Job {
    RunConfig config;
  };
  std::vector<Job> jobs;
  for (Algorithm a : spec.algorithms) {
    for (std::uint64_t seed : spec.seeds) {
      Job job{spec.base};
      job.config.algorithm = a;
      job.config.seed = seed;
      job.config.validate();
      jobs.push_back(job);
    }
  }

  ExperimentResult result;
  result.traces.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        RunOptions options;
        const auto it = comparators.find(jobs[j].config.setting());
        if (it != comparators.end()) options.comparator = &it->second;
        result.traces[j] = run(jobs[j].config, data, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::size_t workers = spec.workers;
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& trace : result.traces) {
    auto meta = trace_metadata(trace, spec.data, spec.argv);
    if (trace.config.loss == LossKind::Logistic && !trace.round_margin.empty()) {
      std::vector<double> labels;
      labels.reserve(trace.rounds.size());
      for (std::size_t s : trace.rounds) labels.push_back(data->label(s));
      const auto stats = classify_stats(trace.round_margin, labels);
      meta.add("accuracy", format_number(stats.accuracy));
      meta.add("mistakes", std::to_string(stats.mistakes));
    }
    const auto path = spec.out_dir / (std::string(to_string(trace.config.algorithm)) +
                                      "_seed" + std::to_string(trace.config.seed) +
                                      ".csv");
    write_trace(trace, meta, path);
    result.trace_files.push_back(path);
  }

  for (Algorithm a : spec.algorithms) {
    std::vector<const RunTrace*> group;
    for (const auto& trace : result.traces) {
      if (trace.config.algorithm == a) group.push_back(&trace);
    }
    auto summary = summarize(a, group);
    if (spec.base.loss == LossKind::Logistic) {
      double acc = 0.0;
      std::size_t counted = 0;
      for (const auto* tr : group) {
        if (tr->round_margin.empty()) continue;
        std::vector<double> labels;
        for (std::size_t s : tr->rounds) labels.push_back(data->label(s));
        acc += classify_stats(tr->round_margin, labels).accuracy;
        ++counted;
      }
      if (counted > 0) summary.accuracy = acc / static_cast<double>(counted);
    }
    const auto path =
        spec.out_dir / (std::string(to_string(a)) + "_summary.csv");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << "# algo = " << to_string(a) << '\n';
    out << "# seeds = ";
    for (std::size_t j = 0; j < group.size(); ++j) {
      out << (j > 0 ? "," : "") << group[j]->config.seed;
    }
    out << '\n';
    if (summary.accuracy) {
      out << "# accuracy = " << format_number(*summary.accuracy) << '\n';
    }
    out << "t,mean,stdev,mean_strict,stdev_strict\n";
    for (std::size_t r = 0; r < summary.t.size(); ++r) {
      out << summary.t[r] << ',' << format_number(summary.mean[r]) << ','
          << format_number(summary.stdev[r]) << ','
          << format_number(summary.mean_strict[r]) << ','
          << format_number(summary.stdev_strict[r]) << '\n';
    }
    result.summary_files.push_back(path);
    result.summaries.push_back(std::move(summary));
  }
  result.plot_file = spec.out_dir / "plotdata.csv";
  emit_plotdata(result.summaries, result.plot_file);
  return result;
}

}  // namespace arcd
