#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "rlab/bilinear.hpp"
#include "rlab/config.hpp"
#include "rlab/error.hpp"
#include "rlab/experiments.hpp"
#include "rlab/grid.hpp"
#include "rlab/plot.hpp"
#include "rlab/table.hpp"

using namespace rlab;
namespace fs = std::filesystem;

namespace {

template <class F>
Error expect_error(ErrorKind kind, F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
    return e;
  }
  ADD_FAILURE() << "expected " << to_string(kind);
  return Error(kind, "");
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Fresh output root per test, exported as RLAB_OUT.
class OutputRoot {
 public:
  explicit OutputRoot(const std::string& name)
      : path_(fs::temp_directory_path() / ("rlab_test_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    ::setenv("RLAB_OUT", path_.c_str(), 1);
  }
  ~OutputRoot() {
    fs::remove_all(path_);
    ::unsetenv("RLAB_OUT");
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

const char* kExpectation = R"(
[run]
experiment = expectation
seed = 3

[grid]
dim = 3
n = 16
box_radius = 3.141592653589793

[sweep]
M = 8, 16
samples = 20

[power]
iters = 30
tol = 1e-5
)";

const char* kKakeya = R"(
[run]
experiment = kakeya
seed = 900
[incidence]
n = 2
configs = 4
n1 = 12
n2 = 12
[kakeya]
C = 1000
Cdelta = 1
)";

int run_cli(const std::string& args) {
  int status = std::system((std::string(RLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(ConfigParse, NamesKeyAndLine) {
  auto e = expect_error(ErrorKind::ConfigParse, [] {
    parse_config("[run]\nexperiment = expectation\n[sweep]\nMx = 8, 16\n");
  });
  std::string msg = e.what();
  EXPECT_NE(msg.find("sweep.Mx"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;

  e = expect_error(ErrorKind::ConfigParse, [] { parse_config("[sweep]\nsamples = twenty\n", "expectation"); });
  EXPECT_NE(std::string(e.what()).find("sweep.samples"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);

  e = expect_error(ErrorKind::ConfigParse, [] { parse_config("[sweep]\n\nM 8\n", "expectation"); });
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  expect_error(ErrorKind::ConfigParse, [] { parse_config("[sweep]\nM = 8,\n", "expectation"); });
  expect_error(ErrorKind::ConfigParse, [] { parse_config("[sweep]\nM = 8\nM = 16\n", "expectation"); });
  expect_error(ErrorKind::ConfigParse, [] { parse_config("M = 8\n", "expectation"); });
  expect_error(ErrorKind::ConfigParse, [] { parse_config("[run]\nexperiment = cgo\n", "kakeya"); });
  expect_error(ErrorKind::ConfigParse, [] { parse_config("[run]\nexperiment = nothing\n"); });
  expect_error(ErrorKind::ConfigParse, [] { parse_config("[sweep]\nM = 8\n"); });
}

TEST(ConfigParse, CanonicalFormAndHash) {
  auto a = parse_config(kExpectation);
  auto b = parse_config("# same run\n[sweep]\nsamples=20\nM = 8.0,16\n[power]\ntol = 0.00001\niters = 30\n"
                        "[grid]\nbox_radius = 3.141592653589793\nn = 16\ndim = 3\n[run]\nseed = 3\n",
                        "expectation");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(run_name(a), run_name(b));
  EXPECT_EQ(a.reals("sweep.M", {}), (std::vector<double>{8.0, 16.0}));
  EXPECT_EQ(a.integer("sweep.samples", 0), 20);
  EXPECT_EQ(a.real("power.restarts", 7.0), 7.0);
  auto c = a;
  c.seed = 4;
  EXPECT_NE(run_name(a), run_name(c));
  EXPECT_EQ(run_name(a).rfind("expectation-", 0), 0u);
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(ResultTable, SchemaValidationAndCsvRoundTrip) {
  ResultTable t = make_table("bilinear");
  t.rows.push_back({2.0, std::string("paraboloid"), 2.0, 0.0625, 0.125, std::string("a,\"b\""), 0.1});
  std::string csv = to_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,surface,p_prime,mu,nu,construction,ratio");
  ResultTable back = parse_csv(csv, make_table("bilinear"));
  ASSERT_EQ(back.rows.size(), 1u);
  EXPECT_EQ(std::get<std::string>(back.rows[0][5]), "a,\"b\"");
  EXPECT_EQ(back.numbers("ratio")[0], 0.1);

  EXPECT_EQ(to_csv(make_table("incidence")), "R,delta,mu2,lambda1,T1,T2,lhs,rhs\n");
  ResultTable bad = make_table("expectation");
  bad.rows.push_back({8.0, 20.5, 1.0, 0.1, 1.0, 0.1});
  expect_error(ErrorKind::InvalidArgument, [&] { validate(bad); });
  bad.rows[0][1] = 20.0;
  bad.rows[0][2] = std::string("x");
  expect_error(ErrorKind::InvalidArgument, [&] { validate(bad); });
  bad.rows[0].pop_back();
  expect_error(ErrorKind::InvalidArgument, [&] { validate(bad); });
  ResultTable renamed = make_table("expectation");
  renamed.columns[0].name = "m";
  expect_error(ErrorKind::InvalidArgument, [&] { validate(renamed); });
  expect_error(ErrorKind::InvalidArgument, [] { make_table("nothing"); });
}

TEST(EmitPlot, EmptyTable) {
  ResultTable t = make_table("induction");
  expect_error(ErrorKind::EmptyTable, [&] { render_plot(t, {PlotKind::loglog, "R", {{"K", ""}}, "", ""}); });
  expect_error(ErrorKind::EmptyTable, [&] { render_plot(t, {PlotKind::trend, "R", {{"K", ""}}, "", ""}); });
}

TEST(EmitPlot, TwoPointLineThroughBoth) {
  ResultTable t = make_table("induction");
  t.rows.push_back({16.0, 2.0, std::string("a")});
  t.rows.push_back({256.0, 0.5, std::string("b")});
  Plot p = render_plot(t, {PlotKind::loglog, "R", {{"K", ""}}, "", "two points"});
  ASSERT_TRUE(p.fit.has_value());
  EXPECT_NEAR(p.fit->slope, -0.5, 1e-12);
  EXPECT_NEAR(std::exp(p.fit->intercept) * std::pow(16.0, p.fit->slope), 2.0, 1e-12);
  EXPECT_NE(p.svg.find("slope R: " + annotation_number(p.fit->slope)), std::string::npos);
  // the fitted segment starts and ends on the two dots
  auto attr = [&](std::size_t at, const std::string& name) {
    std::size_t k = p.svg.find(name + "=\"", at) + name.size() + 2;
    return p.svg.substr(k, p.svg.find('"', k) - k);
  };
  std::size_t dot1 = p.svg.find("<circle"), dot2 = p.svg.find("<circle", dot1 + 1);
  std::size_t line = p.svg.rfind("<line", p.svg.find("stroke-width=\"1.5\""));
  EXPECT_EQ(attr(line, "x1"), attr(dot1, "cx"));
  EXPECT_EQ(attr(line, "y1"), attr(dot1, "cy"));
  EXPECT_EQ(attr(line, "x2"), attr(dot2, "cx"));
  EXPECT_EQ(attr(line, "y2"), attr(dot2, "cy"));
}

TEST(EmitPlot, BilinearSlopeMatchesSharedFit) {
  OutputRoot root("bilinear");
  auto config = parse_config(
      "[run]\nexperiment = bilinear\nseed = 31\n[surface]\nn = 2\n[sweep]\nmu = 0.0625, 0.03125, 0.015625, 0.0078125\n"
      "nu = 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125\ncandidates = 1\n");
  RunOutcome out = run(config);
  ASSERT_TRUE(out.fit.has_value());
  std::vector<double> mus = {0.0625, 0.03125, 0.015625, 0.0078125};
  std::vector<double> nus = {0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  KEstimate k = k_estimate_and_fit(make_paraboloid(2), 2.0, mus, nus, 1, 31);
  EXPECT_NEAR(out.fit->slope, k.e_mu, 1e-6);
  EXPECT_NEAR(out.fit->covariate_slope, k.e_nu, 1e-6);

  // the annotation is recomputable from the CSV alone
  fs::path dir = out.directory;
  ResultTable csv = parse_csv(slurp(dir / "bilinear.csv"), make_table("bilinear"));
  Plot again = render_plot(csv, {PlotKind::loglog, "mu", {{"ratio", ""}}, "nu", ""});
  EXPECT_NEAR(again.fit->slope, k.e_mu, 1e-6);
  EXPECT_NE(slurp(dir / "figure.svg").find("slope mu: " + annotation_number(again.fit->slope)), std::string::npos);
}

TEST(Run, ExpectationTwoRowsAndByteIdenticalRerun) {
  OutputRoot root("expectation");
  auto config = parse_config(kExpectation);
  RunOutcome first = run(config);
  EXPECT_FALSE(first.reused);
  EXPECT_EQ(first.exit_code, 0);
  fs::path dir = first.directory;
  EXPECT_EQ(dir.parent_path(), root.path());
  EXPECT_EQ(dir.filename().string(), run_name(config));
  ResultTable t = parse_csv(slurp(dir / "expectation.csv"), make_table("expectation"));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.numbers("M"), (std::vector<double>{8.0, 16.0}));
  EXPECT_EQ(t.numbers("samples"), (std::vector<double>{20.0, 20.0}));
  for (const char* f : {"config.echo", "version.txt", "figure.svg", "checks.txt", "done"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_EQ(slurp(dir / "config.echo"), config.canonical());

  std::map<std::string, std::string> before;
  for (const char* f : {"expectation.csv", "figure.svg", "checks.txt"}) before[f] = slurp(dir / f);
  RunOutcome reused = run(config);
  EXPECT_TRUE(reused.reused);
  EXPECT_EQ(reused.directory, first.directory);
  RunOutcome forced = run(config, {3, true, std::nullopt});
  EXPECT_FALSE(forced.reused);
  for (const auto& [f, text] : before) EXPECT_EQ(slurp(dir / f), text) << f;

  RunOutcome other = run(config, {1, false, 4});
  EXPECT_NE(other.directory, first.directory);
}

TEST(Run, ResultIndependentOfJobs) {
  OutputRoot root("jobs");
  auto config = parse_config(kKakeya);
  RunOutcome one = run(config, {1, true, std::nullopt});
  std::string csv = slurp(fs::path(one.directory) / "incidence.csv");
  RunOutcome three = run(config, {3, true, std::nullopt});
  EXPECT_EQ(slurp(fs::path(three.directory) / "incidence.csv"), csv);
  EXPECT_GT(one.result.table.rows.size(), 0u);
}

TEST(Run, WavepacketCoefficientFiles) {
  OutputRoot root("wavepacket");
  auto config = parse_config("[run]\nexperiment = wavepacket\nseed = 2\n[field]\nR = 16\ncap_radius = 0.3\n");
  RunOutcome out = run(config);
  EXPECT_EQ(out.exit_code, 0);
  fs::path dir = out.directory;
  RawBlock block = read_block((dir / "coefficients.rlab").string());
  ResultTable index = parse_csv(slurp(dir / "coefficients_index.csv"), packet_index_table(2));
  EXPECT_EQ(block.d, 2);
  EXPECT_EQ(block.n, static_cast<long long>(block.values.size()));
  EXPECT_EQ(block.values.size(), index.rows.size());
  EXPECT_EQ(block.box_radius, 16.0);
}

TEST(Run, ErrorsAndExitCodes) {
  OutputRoot root("cli");
  fs::create_directories(root.path());
  auto write = [&](const std::string& name, const std::string& text) {
    fs::path p = root.path() / name;
    std::ofstream(p) << text;
    return p.string();
  };
  std::string good = write("good.conf", "[run]\nexperiment = induction\n[sweep]\nR = 16, 32\ncandidates = 1\n");
  std::string failing = write("failing.conf", "[sweep]\nR = 16, 32\ncandidates = 1\n[check]\nmax_growth = -5\n");
  std::string malformed = write("bad.conf", "[sweep]\nRR = 16\n");
  EXPECT_EQ(run_cli("induction --config " + good), 0);
  EXPECT_EQ(run_cli("induction --config " + good + " --jobs 2"), 0);
  EXPECT_EQ(run_cli("induction --config " + failing), 2);
  EXPECT_EQ(run_cli("induction --config " + failing), 2);  // reused run keeps its status
  EXPECT_EQ(run_cli("induction --config " + malformed), 1);
  EXPECT_EQ(run_cli("induction --config " + root.path().string() + "/missing.conf"), 1);
  EXPECT_EQ(run_cli("nothing --config " + good), 1);
  EXPECT_EQ(run_cli("cgo --config " + good), 1);

  // a module error surfaces with the experiment name
  auto e = expect_error(ErrorKind::InvalidArgument, [] {
    run(parse_config("[run]\nexperiment = induction\n[sweep]\nR = 8\n"));
  });
  EXPECT_NE(std::string(e.what()).find("experiment 'induction'"), std::string::npos);

  ::setenv("RLAB_OUT", "/proc/rlab_cannot_write_here", 1);
  expect_error(ErrorKind::Unwritable, [] { run(parse_config(kKakeya)); });
}
