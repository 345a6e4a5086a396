#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "arcd/cli.hpp"
#include "arcd/experiment.hpp"
#include "helpers.hpp"

using namespace arcd;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::size_t count_columns(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

}  // namespace

TEST_CASE("SynthSpec parsing") {
  const auto s = SynthSpec::parse("5,200,10,0.5");
  CHECK(s.n == 5);
  CHECK(s.m == 200);
  CHECK(s.condition == 10.0);
  CHECK(s.noise == 0.5);
  CHECK(s.nnz == 0);
  CHECK(SynthSpec::parse("100,20,1,0.1,7").nnz == 7);
  CHECK(SynthSpec::parse("breast-cancer").breast_cancer);
  CHECK(SynthSpec::parse(s.to_string()).to_string() == s.to_string());
  CHECK_THROWS_AS(SynthSpec::parse("5,200"), ConfigError);
  CHECK_THROWS_AS(SynthSpec::parse("5,x,1,0"), ConfigError);
}

TEST_CASE("argument joining round trips through splitting") {
  const std::vector<std::string> args{"--algo", "oarcd,orbcd", "--data", "my file.csv", "--T",
                                      "10"};
  const auto line = join_arguments(args);
  CHECK(line.find("\"my file.csv\"") != std::string::npos);
  CHECK(split_arguments(line) == args);
  CHECK(split_arguments("  a   b ") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("two algorithms and two seeds give four traces and two summaries") {
  testing::TempDir dir("exp_basic");
  std::string out;
  const int code = cli({"--algo", "oarcd,orbcd", "--synth", "3,30,2,0.2", "--T", "60",
                        "--seeds", "2", "--emit-every", "10", "--out", dir.path().string(),
                        "--workers", "2"},
                       &out);
  REQUIRE(code == 0);
  for (const char* name : {"oarcd_seed1.csv", "oarcd_seed2.csv", "orbcd_seed1.csv",
                           "orbcd_seed2.csv", "oarcd_summary.csv", "orbcd_summary.csv",
                           "plotdata.csv", "oarcd_seed1.timing.csv"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  CHECK(out.find("plot data ->") != std::string::npos);

  const auto meta = read_trace_metadata(dir / "oarcd_seed2.csv");
  CHECK(meta.get("algo") == "oarcd");
  CHECK(meta.get("seed") == "2");
  CHECK(meta.get("T") == "60");
  CHECK(meta.get("metric") == "regret");
  CHECK(meta.get("n") == "3");
  CHECK(meta.get("version").has_value());
  CHECK(meta.get("argv").has_value());

  const auto body = read_trace_body(dir / "oarcd_seed1.csv");
  CHECK(body.rfind(kTraceHeader, 0) == 0);
  CHECK(std::count(body.begin(), body.end(), '\n') == 1 + 7);

  std::istringstream plot(slurp(dir / "plotdata.csv"));
  std::string header;
  std::getline(plot, header);
  CHECK(header == "t,oarcd_mean,oarcd_std,orbcd_mean,orbcd_std");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(plot, line)) {
    CHECK(count_columns(line) == 5);
    ++rows;
  }
  CHECK(rows == 7);
}

TEST_CASE("trace bodies are byte identical across reruns and worker counts") {
  testing::TempDir a("exp_det_a");
  testing::TempDir b("exp_det_b");
  const std::vector<std::string> common{"--algo", "sarcd,sgd", "--synth", "4,40,3,0.3",
                                        "--T", "200", "--seeds", "3"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out", a.path().string(), "--workers", "1"});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out", b.path().string(), "--workers", "3"});
  REQUIRE(cli(args_a) == 0);
  REQUIRE(cli(args_b) == 0);
  for (const char* name : {"sarcd_seed1.csv", "sarcd_seed3.csv", "sgd_seed2.csv"}) {
    CHECK(read_trace_body(a / name) == read_trace_body(b / name));
  }
  const auto summary = slurp(a / "sarcd_summary.csv");
  CHECK(summary.find("# seeds = 1,2,3") != std::string::npos);
}

TEST_CASE("single seed has zero standard deviation") {
  testing::TempDir dir("exp_one");
  REQUIRE(cli({"--algo", "ogd", "--synth", "2,10,1,0.1", "--T", "20", "--seeds", "1",
               "--out", dir.path().string()}) == 0);
  std::istringstream plot(slurp(dir / "plotdata.csv"));
  std::string line;
  std::getline(plot, line);
  while (std::getline(plot, line)) {
    CHECK(line.substr(line.rfind(',') + 1) == "0");
  }
}

TEST_CASE("--from-trace reruns the recorded command") {
  testing::TempDir first("exp_src");
  testing::TempDir second("exp_rerun");
  REQUIRE(cli({"--algo", "oarcd", "--synth", "3,20,2,0.1", "--T", "50", "--seeds", "1",
               "--out", first.path().string()}) == 0);
  const auto trace = (first / "oarcd_seed1.csv").string();
  const auto args = rerun_arguments(trace);
  CHECK(std::find(args.begin(), args.end(), "--synth") != args.end());
  REQUIRE(cli({"--from-trace", trace, "--out", second.path().string()}) == 0);
  CHECK(read_trace_body(first / "oarcd_seed1.csv") ==
        read_trace_body(second / "oarcd_seed1.csv"));
}

TEST_CASE("cli reports errors with exit codes") {
  std::string out, err;
  CHECK(cli({"--bogus"}, &out, &err) == 2);
  CHECK(err.find("--bogus") != std::string::npos);
  CHECK(cli({"--help"}, &out, &err) == 0);
  CHECK(out.find("--algo") != std::string::npos);
  CHECK(cli({"--algo", "newton", "--synth", "2,5,1,0"}, &out, &err) == 2);
  CHECK(cli({"--T", "10"}, &out, &err) == 2);
  testing::TempDir dir("exp_err");
  CHECK(cli({"--data", (dir / "missing.csv").string(), "--out", dir.path().string()}, &out,
            &err) == 1);
}

TEST_CASE("parse_cli maps flags onto the experiment") {
  const auto spec = parse_cli({"--algo", "sarcd", "--regime", "strong", "--mu", "0.1",
                               "--seeds", "4,9", "--synth", "3,10,1,0", "--normalize", "unit",
                               "--diagnostics"});
  CHECK(spec.algorithms == std::vector<Algorithm>{Algorithm::Sarcd});
  CHECK(spec.base.regime == Regime::Strong);
  CHECK(spec.base.mu == 0.1);
  CHECK(spec.seeds == std::vector<std::uint64_t>{4, 9});
  CHECK(spec.data.normalization == Normalization::UnitRow);
  CHECK(spec.base.auto_b);
  CHECK_FALSE(parse_cli({"--synth", "3,10,1,0", "--diagnostics", "--b", "2"}).base.auto_b);
  CHECK(parse_cli({"--synth", "3,10,1,0", "--seeds", "3"}).seeds ==
        std::vector<std::uint64_t>{1, 2, 3});
}

TEST_CASE("regret of a frozen learner grows every round") {
  // With eta_c tiny the learner stays at 0 and pays 1/2 per round while the
  // comparator y* = 1 pays nothing.
  testing::TempDir dir("exp_adv");
  const auto csv = dir.write("ones.csv", "1,1\n1,1\n1,1\n1,1\n1,1\n1,1\n");
  REQUIRE(cli({"--algo", "ogd", "--data", csv.string(), "--T", "6", "--eta-c", "1e-9",
               "--emit-every", "1", "--out", dir.path().string()}) == 0);
  std::istringstream body(read_trace_body(dir / "ogd_seed1.csv"));
  std::string line;
  std::getline(body, line);
  double prev = -1.0;
  while (std::getline(body, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    const double metric = std::stod(cells[6]);
    CHECK(metric >= prev - 1e-12);
    prev = metric;
  }
  CHECK(prev > 2.9);
}

TEST_CASE("external binary honours the same flags") {
  const char* exe = std::getenv("ARCD_CLI");
  if (exe == nullptr) return;
  testing::TempDir dir("exp_exe");
  const std::string cmd = std::string(exe) + " --algo oarcd --synth 2,10,1,0 --T 5 --out " +
                          dir.path().string() + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(std::filesystem::exists(dir / "oarcd_seed1.csv"));
  CHECK(std::system((std::string(exe) + " --bogus 2> /dev/null").c_str()) != 0);
}
