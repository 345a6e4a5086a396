#include "arcd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>

namespace arcd {

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  // "N" means seeds 1..N; "a,b,c" lists seeds explicitly.
  std::vector<std::uint64_t> seeds;
  try {
    if (text.find(',') == std::string::npos) {
      const auto count = std::stoull(text);
      for (std::uint64_t s = 1; s <= count; ++s) seeds.push_back(s);
    } else {
      for (const auto& item : split_list(text)) seeds.push_back(std::stoull(item));
    }
  } catch (const std::exception&) {
    throw ConfigError("--seeds: cannot parse '" + text + "'");
  }
  if (seeds.empty()) throw ConfigError("--seeds: at least one seed is required");
  return seeds;
}

struct CliValues {
  std::string algos = "oarcd";
  std::string regime = "general";
  std::string loss = "squared";
  std::string data;
  std::string format = "csv";
  int label_col = -1;
  bool header = false;
  std::size_t n_features = 0;
  std::string normalize = "none";
  double mu = 0.0;
  double b = 1.0;
  double alpha = 0.5;
  double eta_c = 1.0;
  std::int64_t T = 1000;
  std::string seeds = "1";
  std::int64_t emit_every = 0;
  bool lazy = false;
  bool diagnostics = false;
  std::string out = "arcd_out";
  std::string synth;
  std::uint64_t data_seed = 1;
  std::size_t workers = 0;
  std::string sage_setting = "online";
  bool prefix_comparator = false;
  std::string from_trace;
};

void configure(CLI::App& app, CliValues& v) {
  app.add_option("--algo", v.algos,
                 "Comma-separated algorithms: sarcd, oarcd, orbcd, ogd, sgd, sage")
      ->capture_default_str();
  app.add_option("--regime", v.regime, "general or strong")
      ->check(CLI::IsMember({"general", "strong"}))
      ->capture_default_str();
  app.add_option("--loss", v.loss, "squared or logistic")
      ->check(CLI::IsMember({"squared", "logistic"}))
      ->capture_default_str();
  app.add_option("--data", v.data, "Dataset path (csv or libsvm)");
  app.add_option("--format", v.format, "csv or libsvm")
      ->check(CLI::IsMember({"csv", "libsvm"}))
      ->capture_default_str();
  app.add_option("--label-col", v.label_col,
                 "CSV label column (0-based, -1 = last)")
      ->capture_default_str();
  app.add_flag("--header", v.header, "CSV file starts with a header line");
  app.add_option("--n-features", v.n_features,
                 "LIBSVM feature count (0 = largest index seen)")
      ->capture_default_str();
  app.add_option("--normalize", v.normalize, "none, unit or minmax")
      ->check(CLI::IsMember({"none", "unit", "minmax"}))
      ->capture_default_str();
  app.add_option("--mu", v.mu, "Strong-convexity weight (strong regime)")
      ->capture_default_str();
  app.add_option("--b", v.b,
                 "Constant b of the general stochastic schedule (with "
                 "--diagnostics and no --b: balanced from sigma and D)")
      ->capture_default_str();
  app.add_option("--alpha", v.alpha, "Blend constant of the online schedules")
      ->capture_default_str();
  app.add_option("--eta-c", v.eta_c, "c in the baseline step c/sqrt(t)")
      ->capture_default_str();
  app.add_option("--T", v.T, "Horizon (steps or rounds)")->capture_default_str();
  app.add_option("--seeds", v.seeds, "Seed count N (seeds 1..N) or list a,b,c")
      ->capture_default_str();
  app.add_option("--emit-every", v.emit_every,
                 "Trace row cadence (0 = max(1, T/1000))")
      ->capture_default_str();
  app.add_flag("--lazy-rep", v.lazy, "Scaled lazy iterates for sarcd/oarcd (mu = 0)");
  app.add_flag("--diagnostics", v.diagnostics, "Measure L, sigma, D, R, G");
  app.add_option("--out", v.out, "Output directory")->capture_default_str();
  app.add_option("--synth", v.synth,
                 "Synthetic data n,m,cond,noise[,nnz] instead of --data");
  app.add_option("--data-seed", v.data_seed, "Seed of the synthetic generator")
      ->capture_default_str();
  app.add_option("--workers", v.workers, "Worker threads (0 = available cores)")
      ->capture_default_str();
  app.add_option("--sage-setting", v.sage_setting,
                 "Protocol of the sage baseline: online or stochastic")
      ->check(CLI::IsMember({"online", "stochastic"}))
      ->capture_default_str();
  app.add_flag("--prefix-comparator", v.prefix_comparator,
               "Also record the best fixed point of every prefix");
  app.add_option("--from-trace", v.from_trace,
                 "Re-run the experiment recorded in a trace file");
}

ExperimentSpec to_spec(const CliValues& v, const std::vector<std::string>& args,
                       bool b_given) {
  ExperimentSpec spec;
  spec.algorithms.clear();
  for (const auto& name : split_list(v.algos)) {
    const Algorithm a = parse_algorithm(name);
    if (std::find(spec.algorithms.begin(), spec.algorithms.end(), a) ==
        spec.algorithms.end()) {
      spec.algorithms.push_back(a);
    }
  }
  if (spec.algorithms.empty()) throw ConfigError("--algo: no algorithm given");
  spec.seeds = parse_seeds(v.seeds);

  RunConfig& c = spec.base;
  c.regime = parse_regime(v.regime);
  c.loss = parse_loss(v.loss);
  c.mu = v.mu;
  c.b = v.b;
  c.auto_b = v.diagnostics && !b_given;
  c.alpha = v.alpha;
  c.eta_c = v.eta_c;
  c.horizon = v.T;
  c.emit_every = v.emit_every;
  c.lazy = v.lazy;
  c.diagnostics = v.diagnostics;
  c.prefix_comparator = v.prefix_comparator;
  c.sage_setting = parse_setting(v.sage_setting);
  if (c.horizon < 1) throw ConfigError("--T must be at least 1");
  if (c.emit_every < 0) throw ConfigError("--emit-every must be >= 0");

  DataSpec& d = spec.data;
  if (!v.synth.empty() && !v.data.empty()) {
    throw ConfigError("pass either --data or --synth, not both");
  }
  if (v.synth.empty() && v.data.empty()) {
    throw ConfigError("no dataset: pass --data or --synth");
  }
  if (!v.synth.empty()) {
    d.synth = SynthSpec::parse(v.synth);
    c.dataset = "synth:" + v.synth;
  } else {
    d.path = v.data;
    c.dataset = v.data;
  }
  d.format = v.format;
  d.label_column = v.label_col;
  d.header = v.header;
  if (v.n_features > 0) d.cols = v.n_features;
  d.normalization = parse_normalization(v.normalize);
  d.data_seed = v.data_seed;

  spec.out_dir = v.out;
  spec.workers = v.workers;
  spec.argv = args;
  c.validate();
  return spec;
}

}  // namespace

std::string join_arguments(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) {
    if (!out.empty()) out += ' ';
    const bool quote =
        a.empty() || std::any_of(a.begin(), a.end(), [](unsigned char ch) {
          return std::isspace(ch) != 0 || ch == '"';
        });
    if (!quote) {
      out += a;
      continue;
    }
    out += '"';
    for (char ch : a) {
      if (ch == '"' || ch == '\\') out += '\\';
      out += ch;
    }
    out += '"';
  }
  return out;
}

std::vector<std::string> split_arguments(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_token = false;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '\\' && i + 1 < line.size()) {
        cur += line[++i];
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
      in_token = true;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      if (in_token) out.push_back(std::move(cur));
      cur.clear();
      in_token = false;
    } else {
      cur += ch;
      in_token = true;
    }
  }
  if (quoted) throw ConfigError("unterminated quote in recorded arguments");
  if (in_token) out.push_back(std::move(cur));
  return out;
}

ExperimentSpec parse_cli(const std::vector<std::string>& args) {
  CLI::App app{"arcd"};
  CliValues v;
  configure(app, v);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);
  if (!v.from_trace.empty()) {
    const auto recorded = rerun_arguments(v.from_trace);
    CLI::App replay{"arcd"};
    CliValues rv;
    configure(replay, rv);
    std::vector<std::string> rev(recorded.rbegin(), recorded.rend());
    replay.parse(rev);
    if (!rv.from_trace.empty()) {
      throw ConfigError("recorded arguments must not contain --from-trace");
    }
    // An explicit --out on the rerun command redirects the output.
    if (app.count("--out") > 0) rv.out = v.out;
    return to_spec(rv, recorded, replay.count("--b") > 0);
  }
  return to_spec(v, args, app.count("--b") > 0);
}

std::vector<std::string> rerun_arguments(const std::string& trace_path) {
  const auto meta = read_trace_metadata(trace_path);
  const auto line = meta.get("argv");
  if (!line) throw ConfigError("'" + trace_path + "' has no argv metadata");
  return split_arguments(*line);
}

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  ExperimentSpec spec;
  try {
    spec = parse_cli(args);
  } catch (const CLI::CallForHelp&) {
    CLI::App app{"Accelerated randomized coordinate descent experiments", "arcd"};
    CliValues v;
    configure(app, v);
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "arcd: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "arcd: " << e.what() << "\n";
    return 2;
  }
  try {
    const auto result = run_experiment(spec);
    for (std::size_t j = 0; j < result.traces.size(); ++j) {
      const auto& tr = result.traces[j];
      out << to_string(tr.config.algorithm) << " seed=" << tr.config.seed
          << " T=" << tr.config.horizon << " "
          << (tr.setting == Setting::Online ? "regret=" : "suboptimality=")
          << format_number(tr.final_metric())
          << " step_ms=" << format_number(static_cast<double>(tr.step_ns) / 1e6)
          << " -> " << result.trace_files[j].string() << "\n";
    }
    for (const auto& s : result.summaries) {
      if (s.mean.empty()) continue;
      out << to_string(s.algorithm) << " mean=" << format_number(s.mean.back())
          << " std=" << format_number(s.stdev.back());
      if (s.accuracy) out << " accuracy=" << format_number(*s.accuracy);
      out << "\n";
    }
    out << "plot data -> " << result.plot_file.string() << "\n";
  } catch (const std::exception& e) {
    err << "arcd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace arcd
