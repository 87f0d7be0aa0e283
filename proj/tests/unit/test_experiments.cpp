#include "horolab/error.hpp"
#include "horolab/experiments.hpp"
#include "horolab/random.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace horolab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

// Message of the invalid_config error the text raises, or "" if it parses.
std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_config);
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("horolab-" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ExperimentConfig quick(std::vector<std::string> experiments) {
  auto c = parse(
      "name = quick\n"
      "seed = 5\n"
      "exponent.max_length = 6\n"
      "density.length = 5\n"
      "density.conformality_lengths = 3, 5\n"
      "samples.draws = 20000\n");
  c.experiments = std::move(experiments);
  return c;
}

}  // namespace

TEST(ConfigParser, DefaultsMatchTheStandardExample) {
  auto c = parse("name = schottky-n2-standard\nseed = 20240611\nexperiments = all\n");
  EXPECT_EQ(canonical_text(c), canonical_text(standard_config()));
  EXPECT_EQ(c.seed, standard_config().seed);
}

TEST(ConfigParser, BundledConfigIsTheStandardExample) {
  const auto c = load_config(std::string(HOROLAB_SOURCE_DIR) + "/configs/schottky-n2-standard.cfg");
  EXPECT_EQ(canonical_text(c), canonical_text(standard_config()));
  EXPECT_EQ(config_hash(c), config_hash(standard_config()));
  EXPECT_EQ(c.seed, standard_config().seed);
}

TEST(ConfigParser, CanonicalTextRoundTrips) {
  const auto c = parse(
      "name = custom\n"
      "dim = 3\n"
      "group.pairing = 1 0 0 : 0.5 -> -1 0 0 : 0.5 twist 0.3\n"
      "group.pairing = 0 1 0 : 0.4 -> 0 -1 0 : 0.4\n"
      "windows.T = 2 4 8\n"
      "tolerance.shadow.slope = 0.2\n"
      "experiments = windows, shadow\n");
  EXPECT_EQ(c.pairings.size(), 2u);
  EXPECT_DOUBLE_EQ(c.pairings[0].twist, 0.3);
  EXPECT_DOUBLE_EQ(c.core_spacing, 0.25);
  EXPECT_DOUBLE_EQ(c.tolerance("shadow.slope"), 0.2);
  EXPECT_EQ(c.experiments, (std::vector<std::string>{"windows", "shadow"}));
  EXPECT_EQ(canonical_text(parse(canonical_text(c))), canonical_text(c));
}

TEST(ConfigParser, CommentsAndBlankLinesAreIgnored) {
  const auto c = parse("# heading\n\n  dim = 2   # trailing\nsamples.draws = 1000\n");
  EXPECT_EQ(c.draws, 1000u);
}

TEST(ConfigParser, UnknownKeyNamesLineAndField) {
  const auto msg = config_error("dim = 2\n\ngroup.radious = 0.7\n");
  EXPECT_NE(msg.find("test.cfg:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("group.radious"), std::string::npos) << msg;
}

TEST(ConfigParser, RejectsMalformedAndInconsistentSettings) {
  for (const char* bad : {
           "dim = 2\ndim = 2\n",                                // duplicate
           "group.radius = big\n",                              // not a number
           "group.rank = 1.5\n",                                // not an integer
           "dim = 5\n",                                         // unsupported dimension
           "samples.draws = -3\n",                              // negative count
           "exponent.min_length = 6\nexponent.max_length = 4\n",
           "shadow.min = 10\nshadow.max = 5\n",
           "translates.f_radius = 1.5\n",
           "diophantine.epsilon = 1\n",
           "experiments = windows, nonsense\n",
           "tolerance.no.such = 1\n",
           "group.rank = 2\ngroup.pairing = 1 0 : 0.5 -> -1 0 : 0.5\n",
           "group.pairing = 1 0 : 0.5 -> -1 0\n",
           "just some words\n",
       }) {
    EXPECT_NE(config_error(bad), "") << bad;
  }
}

TEST(ConfigParser, MissingFileIsAnIoError) {
  try {
    load_config("/nonexistent/dir/none.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
}

TEST(ConfigHash, IgnoresTheSeedButNotTheSettings) {
  auto a = standard_config(), b = standard_config();
  b.seed = 99;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.draws = 1000;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Catalog, ListsEveryExperimentOnce) {
  std::set<std::string> ids;
  for (const auto& e : experiment_catalog()) {
    EXPECT_TRUE(ids.insert(e.id).second) << e.id;
    EXPECT_FALSE(e.description.empty());
    EXPECT_TRUE(is_experiment(e.id));
  }
  EXPECT_EQ(ids.size(), 13u);
  EXPECT_FALSE(is_experiment("everything"));
}

TEST(Lab, OverlappingBallsFailConstructionNamingThePair) {
  auto c = parse(
      "group.pairing = 1 0 : 0.6 -> -1 0 : 0.6\n"
      "group.pairing = 0.8 0.6 : 0.6 -> -0.8 -0.6 : 0.6\n");
  Lab lab(c);
  try {
    lab.group();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::construction_failed);
    EXPECT_NE(std::string(e.what()).find("and"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("overlap"), std::string::npos) << e.what();
  }
}

TEST(Lab, UnknownExperimentIsAConfigError) {
  Lab lab(quick({}));
  try {
    lab.run("nonsense");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_config);
  }
}

TEST(Lab, StreamsDependOnlyOnSeedAndName) {
  Lab a(quick({"algebra"})), b(quick({"windows", "algebra", "shadow"}));
  EXPECT_EQ(a.stream("algebra"), b.stream("algebra"));
  EXPECT_NE(a.stream("algebra"), a.stream("geometry"));
  EXPECT_EQ(a.stream("algebra"), split_seed(5, stream_id("algebra")));
}

TEST(Lab, ReportsCarryHashAndSeed) {
  Lab lab(quick({"algebra"}));
  const auto r = lab.run("algebra");
  EXPECT_EQ(r.id, "algebra");
  EXPECT_EQ(r.config_hash, config_hash(lab.config()));
  EXPECT_EQ(r.seed, 5u);
  EXPECT_FALSE(r.table.columns.empty());
  EXPECT_TRUE(r.passed());
}

TEST(Lab, SameConfigAndSeedGiveIdenticalTables) {
  auto table = [](int jobs) {
    Lab lab(quick({"windows"}), jobs);
    std::ostringstream out;
    write_table(out, lab.run("windows"));
    return out.str();
  };
  EXPECT_EQ(table(1), table(2));
}

TEST(Lab, AnotherSeedChangesTheSampledTables) {
  auto c = quick({"geometry"});
  Lab a(c);
  c.seed = 6;
  Lab b(c);
  std::ostringstream x, y;
  write_table(x, a.run("geometry"));
  write_table(y, b.run("geometry"));
  EXPECT_NE(x.str(), y.str());
}

TEST(EmitOutputs, EmptyExperimentListWritesOnlyTheSummary) {
  TempDir dir("empty");
  const auto paths = emit_outputs(dir.path.string(), quick({}), {});
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(fs::path(paths[0]).filename(), "summary.txt");
  EXPECT_NE(slurp(paths[0]).find("verdict = pass"), std::string::npos);
}

TEST(EmitOutputs, PlotToggleAndIdempotentReEmit) {
  const auto c = quick({"geometry", "density"});
  Lab lab(c);
  std::vector<ExperimentReport> reports{lab.run("geometry"), lab.run("density")};
  ASSERT_TRUE(reports[1].plot.has_value());

  TempDir with("plots"), without("noplots");
  const auto first = emit_outputs(with.path.string(), c, reports);
  EXPECT_TRUE(fs::exists(with.path / "density.svg"));
  EXPECT_TRUE(fs::exists(with.path / "density.tsv"));
  EXPECT_TRUE(fs::exists(with.path / "geometry.tsv"));

  std::map<std::string, std::string> before;
  for (const auto& p : first) before[p] = slurp(p);
  const auto second = emit_outputs(with.path.string(), c, reports);
  EXPECT_EQ(first, second);
  for (const auto& p : second) EXPECT_EQ(slurp(p), before[p]) << p;
  for (const auto& entry : fs::directory_iterator(with.path)) {
    EXPECT_NE(entry.path().extension(), ".tmp");
  }

  emit_outputs(without.path.string(), c, reports, EmitOptions{false});
  for (const auto& entry : fs::directory_iterator(without.path)) {
    EXPECT_NE(entry.path().extension(), ".svg") << entry.path();
  }
  EXPECT_TRUE(fs::exists(without.path / "summary.txt"));
}

TEST(EmitOutputs, TableHeaderNamesExperimentConfigAndSeed) {
  Lab lab(quick({"algebra"}));
  std::ostringstream out;
  write_table(out, lab.run("algebra"));
  const std::string header = out.str().substr(0, out.str().find('\n'));
  EXPECT_EQ(header, "# experiment=algebra config=" + config_hash(lab.config()) + " seed=5");
}

TEST(EmitOutputs, UnwritableDirectoryIsAnIoError) {
  TempDir dir("blocked");
  fs::create_directories(dir.path.parent_path());
  std::ofstream(dir.path.string()) << "a file, not a directory";
  try {
    emit_outputs((dir.path / "sub").string(), quick({}), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
}

TEST(Svg, IsWellFormedAndEscapesText) {
  Plot plot{"a < b & c", "T", "value", true, true, {{"series \"one\"", {1, 10, 100}, {0.5, 0.1, 0.01}, {}}}};
  std::ostringstream out;
  write_svg(out, plot);
  const auto svg = out.str();
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_NE(svg.find("&quot;one&quot;"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
}
