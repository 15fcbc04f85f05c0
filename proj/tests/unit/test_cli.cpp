#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnstrip/config.hpp"
#include "dnstrip/errors.hpp"
#include "dnstrip/report.hpp"
#include "dnstrip/runner.hpp"

using namespace dnstrip;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "t.toml");
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dnstrip_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

const char* kSmall = R"(
[[scenario]]
id = "flat"
kind = "spectrum"
epsilon = [0.25]
L = 3.0
n_s = 31
n_t = 10

[[scenario]]
id = "lemma"
kind = "appendix"
theorem = "LA1"
instances = 5
resolution = 64
)";

}  // namespace

TEST(Config, MinimalScenarioUsesDefaults) {
  const auto cfgs = parse_config_text("[[scenario]]\nid = \"flat\"\n");
  ASSERT_EQ(cfgs.size(), 1u);
  const ScenarioConfig& c = cfgs[0];
  EXPECT_EQ(c.kind, ScenarioKind::spectrum);
  EXPECT_EQ(c.theorem, "T1");
  EXPECT_EQ(c.epsilons, std::vector<double>{0.1});
  EXPECT_DOUBLE_EQ(c.grid.half_length, 10.0);
  EXPECT_EQ(c.grid.n_s, 400);
  EXPECT_EQ(c.grid.n_t, 20);
  EXPECT_TRUE(c.profile().is_flat());
}

TEST(Config, FullScenarioParses) {
  const auto cfgs = parse_config_text(R"(
# comment
[[scenario]]
id = "thin"          # trailing comment
kind = "sweep"
theorem = "T5"
epsilon = [0.2, 0.1, 0.05,]
L = 12
tol = 1e-10

[scenario.curvature]
family = "gaussian_bump"
amplitude = -1.0
width = 2.0

[scenario.policy]
h_s = 0.1
discrete_threshold = true

[[scenario]]
id = "other"
kind = "validate"
)");
  ASSERT_EQ(cfgs.size(), 2u);
  EXPECT_EQ(cfgs[0].epsilons.size(), 3u);
  EXPECT_EQ(cfgs[0].curvature.family, Family::gaussian_bump);
  EXPECT_DOUBLE_EQ(cfgs[0].curvature.amplitude, -1.0);
  EXPECT_DOUBLE_EQ(cfgs[0].policy.h_s, 0.1);
  EXPECT_DOUBLE_EQ(cfgs[0].policy.half_length, 12.0);
  EXPECT_DOUBLE_EQ(cfgs[0].policy.tol, 1e-10);
  EXPECT_TRUE(cfgs[0].policy.discrete_threshold);
  EXPECT_EQ(cfgs[1].id, "other");
}

TEST(Config, RejectsNegativeEpsilonNamingField) {
  const std::string e = error_of("[[scenario]]\nid = \"a\"\nepsilon = [0.1, -0.2]\n");
  EXPECT_NE(e.find("t.toml:3"), std::string::npos) << e;
  EXPECT_NE(e.find("epsilon"), std::string::npos) << e;
}

TEST(Config, RejectsDuplicateId) {
  const std::string e = error_of("[[scenario]]\nid = \"a\"\n[[scenario]]\nid = \"a\"\n");
  EXPECT_NE(e.find("duplicate scenario id"), std::string::npos) << e;
}

TEST(Config, RejectsUnknownKeysAndSyntax) {
  EXPECT_NE(error_of("[[scenario]]\nid = \"a\"\ncolour = 3\n").find("t.toml:3: unknown key 'colour'"),
            std::string::npos);
  EXPECT_NE(error_of("[[scenario]]\nid = \"a\"\n[scenario.curvature]\nshape = 1\n").find("unknown key"),
            std::string::npos);
  EXPECT_NE(error_of("[[scenario]]\nid = \"a\"\nL = abc\n").find("t.toml:3: invalid number"), std::string::npos);
  EXPECT_NE(error_of("[[scenario]]\nid \"a\"\n").find("t.toml:2"), std::string::npos);
  EXPECT_NE(error_of("id = \"a\"\n").find("outside"), std::string::npos);
  EXPECT_NE(error_of("[[scenario]]\nid = \"a\"\nL = 1\nL = 2\n").find("duplicate key"), std::string::npos);
  EXPECT_NE(error_of("[[scenario]]\nid = \"a\"\nkind = \"hardy\"\ntheorem = \"T8\"\n").find("not valid"),
            std::string::npos);
  EXPECT_NE(error_of("[[scenario]]\nkind = \"hardy\"\n").find("missing 'id'"), std::string::npos);
  EXPECT_NE(error_of("[[scenario]]\nid = \"a\"\nn_s = 10.5\n").find("integer"), std::string::npos);
  EXPECT_NE(error_of("[[scenario]]\nid = \"a\"\n[scenario.twist]\nwidth = -1\n").find("width"), std::string::npos);
  EXPECT_NE(error_of("").find("no [[scenario]]"), std::string::npos);
}

TEST(Report, JsonCsvAndSvg) {
  SweepReport r;
  r.scenario = "demo";
  r.theorem = "T7";
  r.columns = {"eps", "gap_norm"};
  r.records = {{0.2, 1e-3}, {0.1, std::nan("")}};
  r.has_fit = true;
  r.fit = {1.5, -2.0, 0.01};
  r.verdict = true;
  r.criterion = "demo";
  const std::string js = to_json(r);
  EXPECT_NE(js.find("\"schema_version\": 1"), std::string::npos);
  EXPECT_NE(js.find("\"gap_norm\": null"), std::string::npos);
  EXPECT_NE(js.find("\"exponent\": 1.5"), std::string::npos);
  std::ostringstream csv;
  write_csv(csv, r);
  EXPECT_EQ(csv.str(), "eps,gap_norm\n0.20000000000000001,0.001\n0.10000000000000001,nan\n");
  std::ostringstream svg;
  write_svg(svg, r, PlotSpec{"eps", "gap_norm", true, true});
  EXPECT_EQ(svg.str().rfind("<svg", 0), 0u);
  EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
  EXPECT_THROW(write_svg(svg, r, PlotSpec{"eps", "missing"}), InvalidInput);
}

TEST(Runner, FlatScenarioPassesAndOutputsAreDeterministic) {
  const auto cfgs = parse_config_text(kSmall);
  const fs::path a = scratch("run_a");
  const fs::path b = scratch("run_b");
  RunOptions opt;
  opt.out_dir = a.string();
  const auto out1 = run(cfgs, opt);
  opt.out_dir = b.string();
  opt.jobs = 2;
  const auto out2 = run(cfgs, opt);
  ASSERT_EQ(out1.size(), 2u);
  EXPECT_TRUE(out1[0].passed()) << (out1[0].report.notes.empty() ? "" : out1[0].report.notes[0]);
  EXPECT_TRUE(out1[1].passed());
  EXPECT_EQ(exit_code(out1), 0);
  for (const char* f : {"flat.json", "flat.csv", "flat.svg", "lemma.json", "lemma.csv"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  // lambda_1 equals the discrete closed form
  EXPECT_NEAR(out1[0].report.value(0, "lambda_1"), out1[0].report.value(0, "closed_form_discrete"), 1e-8);
}

TEST(Runner, ViolatedHypothesisFails) {
  const auto cfgs = parse_config_text(R"(
[[scenario]]
id = "too_wide"
kind = "spectrum"
epsilon = [0.6]
L = 3.0
n_s = 31
n_t = 10
[scenario.curvature]
family = "gaussian_bump"
amplitude = 2.0
)");
  RunOptions opt;
  opt.out_dir = scratch("violated").string();
  const auto out = run(cfgs, opt);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].passed());
  EXPECT_EQ(exit_code(out), 1);
  ASSERT_FALSE(out[0].report.notes.empty());
  EXPECT_NE(out[0].report.notes[0].find("thin_condition"), std::string::npos);
}

TEST(Runner, KindFilter) {
  const auto cfgs = parse_config_text(kSmall);
  RunOptions opt;
  opt.out_dir = scratch("filter").string();
  opt.kinds = {ScenarioKind::appendix};
  const auto out = run(cfgs, opt);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].config.id, "lemma");
}

TEST(Binary, ExitCodes) {
  const fs::path d = scratch("binary");
  {
    std::ofstream f(d / "ok.toml");
    f << kSmall;
    std::ofstream g(d / "bad.toml");
    g << "[[scenario]]\nid = \"w\"\nkind = \"validate\"\nepsilon = [0.6]\n[scenario.curvature]\nfamily = "
         "\"gaussian_bump\"\namplitude = 2.0\n";
    std::ofstream h(d / "broken.toml");
    h << "[[scenario]]\nid = \"w\"\nepsilon = [-1]\n";
  }
  const std::string cli = DNSTRIP_CLI;
  const auto call = [&](const std::string& args) {
    const int rc = std::system((cli + " " + args + " > " + (d / "log.txt").string() + " 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  EXPECT_EQ(call("run --config " + (d / "ok.toml").string() + " --out " + (d / "o1").string()), 0);
  EXPECT_EQ(call("validate --config " + (d / "bad.toml").string() + " --out " + (d / "o2").string()), 1);
  EXPECT_EQ(call("run --config " + (d / "broken.toml").string() + " --out " + (d / "o3").string()), 2);
  EXPECT_EQ(call("spectrum --config " + (d / "ok.toml").string() + " --no-svg --out " + (d / "o4").string()), 0);
  EXPECT_TRUE(fs::exists(d / "o4" / "flat.csv"));
  EXPECT_FALSE(fs::exists(d / "o4" / "flat.svg"));
  EXPECT_FALSE(fs::exists(d / "o4" / "lemma.csv"));
}
