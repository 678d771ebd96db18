#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "dataset.hpp"
#include "json.hpp"
#include "report.hpp"

using namespace powergain;
using namespace powergain::cli;

namespace {

const std::string kFixtures = POWERGAIN_FIXTURES;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "powergain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("powergain_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST(Dataset, HeaderAndDelimiterDetection) {
  std::istringstream csv("t,study_id\n1.5,a\n-2.0,b\n# comment\n\n3.1,a\n");
  const TScoreSample a = parse_tscores(csv);
  EXPECT_EQ(a.t, (std::vector<double>{1.5, -2.0, 3.1}));
  EXPECT_EQ(a.study_id, (std::vector<std::string>{"a", "b", "a"}));

  std::istringstream tsv("1.5\tx\n2.5\ty\n");
  const TScoreSample b = parse_tscores(tsv);
  EXPECT_EQ(b.t.size(), 2u);
  EXPECT_EQ(b.study_id[1], "y");

  std::istringstream single("0.5\n1.0\r\n2.0\n");
  const TScoreSample c = parse_tscores(single);
  EXPECT_EQ(c.t, (std::vector<double>{0.5, 1.0, 2.0}));
  EXPECT_FALSE(c.has_study_ids());

  std::istringstream reordered("study_id\tt\ns1\t2.2\ns2\t-0.3\n");
  const TScoreSample d = parse_tscores(reordered);
  EXPECT_EQ(d.t, (std::vector<double>{2.2, -0.3}));
}

TEST(Dataset, ErrorsListLineNumbers) {
  std::istringstream bad("t\n1.0\nabc\n2.0\ninf\n\n1e999\n");
  try {
    parse_tscores(bad);
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos);
    EXPECT_NE(msg.find("line 5"), std::string::npos);
    EXPECT_NE(msg.find("line 7"), std::string::npos);
    EXPECT_EQ(msg.find("line 4"), std::string::npos);
  }
  std::istringstream empty("t\n");
  EXPECT_THROW(parse_tscores(empty), ParseError);
  std::istringstream no_t("x,y\n1,2\n");
  EXPECT_THROW(parse_tscores(no_t), ParseError);
}

TEST(Dataset, ConditionalColumns) {
  std::istringstream ok("group_id,effect,std_error,weight,site_id\ng1,0.2,0.1,100,s1\ng2,0.1,0.2,50,s1\ng1,0.3,0.1,80,s2\n");
  const auto groups = parse_conditional(ok);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].effects, (std::vector<double>{0.2, 0.3}));
  EXPECT_EQ(groups[0].sites, (std::vector<std::string>{"s1", "s2"}));
  std::istringstream missing("group_id,effect\ng1,0.2\n");
  try {
    parse_conditional(missing);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("std_error"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("weight"), std::string::npos);
  }
}

TEST(Cli, EstimateFixtureWithinThreeSe) {
  const Result r = invoke({"estimate", kFixtures + "/bimodal_500.csv", "--out", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const double d = j.at("delta_hat").get<double>();
  const double se = j.at("std_error").get<double>();
  EXPECT_LT(std::abs(d - 0.12), 3.0 * se);
  EXPECT_EQ(j.at("J").get<int>(), 14);
  EXPECT_EQ(j.at("manifest").at("dataset_sha256").get<std::string>().size(), 64u);
  EXPECT_NE(r.err.find("iid"), std::string::npos);
}

TEST(Cli, UnitMultiplierGivesZero) {
  const Result r = invoke({"estimate", kFixtures + "/bimodal_500.csv", "--c2", "1", "--out", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("delta_hat").get<double>(), 0.0);
}

TEST(Cli, NoPbMatchesWhenThetaIsOne) {
  const std::string path = temp_file("theta_one.csv", "t\n0.2\n-1.0\n1.93\n1.99\n-1.92\n2.01\n3.5\n-0.4\n2.9\n5.1\n0.8\n-2.4\n");
  const Result a = invoke({"estimate", path, "--const-C", "0.5", "--out", "json"});
  const Result b = invoke({"estimate", path, "--const-C", "0.5", "--no-pb", "--out", "json"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const auto ja = nlohmann::json::parse(a.out);
  const auto jb = nlohmann::json::parse(b.out);
  EXPECT_EQ(ja.at("theta_hat").get<double>(), 1.0);
  EXPECT_EQ(ja.at("delta_hat").get<double>(), jb.at("delta_hat").get<double>());
}

TEST(Cli, JsonRoundTripReproducesText) {
  const Result text = invoke({"estimate", kFixtures + "/bimodal_clustered.tsv", "--scale-by", "studies"});
  const Result json = invoke({"estimate", kFixtures + "/bimodal_clustered.tsv", "--scale-by", "studies", "--out", "json"});
  ASSERT_EQ(text.code, 0) << text.err;
  const std::string path = temp_file("report.json", json.out);
  const Result rendered = invoke({"render", path});
  ASSERT_EQ(rendered.code, 0) << rendered.err;
  EXPECT_EQ(rendered.out, text.out);
  const EstimateReport back = report_from_json(nlohmann::json::parse(json.out));
  EXPECT_EQ(render_text(back), text.out);
}

TEST(Cli, CsvOutput) {
  const Result r = invoke({"estimate", kFixtures + "/bimodal_500.csv", "--out", "csv"});
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::string header;
  std::string row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(header.rfind("c2,delta_hat,std_error", 0), 0u);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
}

TEST(Cli, CurveRows) {
  const Result r = invoke({"curve", kFixtures + "/bimodal_500.csv", "--grid", "1,2,4", "--out", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1].rfind("1,0,", 0), 0u);

  const Result scalar = invoke({"estimate", kFixtures + "/bimodal_500.csv", "--out", "json"});
  const Result two = invoke({"curve", kFixtures + "/bimodal_500.csv", "--grid", "2", "--out", "json"});
  const auto js = nlohmann::json::parse(scalar.out);
  const auto jc = nlohmann::json::parse(two.out).at("curve").at(0);
  EXPECT_EQ(js.at("delta_hat").get<double>(), jc.at("delta_hat").get<double>());
  EXPECT_EQ(js.at("std_error").get<double>(), jc.at("std_error").get<double>());

  EXPECT_EQ(invoke({"curve", kFixtures + "/bimodal_500.csv", "--grid", "0.5"}).code, kExitInvalidFlags);
}

TEST(Cli, SimulateDeterministic) {
  const Result a = invoke({"simulate", "--dgp", "bimodal", "--n", "200", "--reps", "1", "--seed", "7"});
  const Result b = invoke({"simulate", "--dgp", "bimodal", "--n", "200", "--reps", "1", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find(",1,0,7"), std::string::npos);
  const Result bad = invoke({"simulate", "--dgp", "gamma"});
  EXPECT_EQ(bad.code, kExitInvalidFlags);
  EXPECT_NE(bad.err.find("truenull"), std::string::npos);
}

TEST(Cli, SimulateTableFilter) {
  const Result r = invoke({"simulate", "--table", "1", "--n", "50", "--dgp", "large", "--reps", "20", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  int rows = -1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 1);
  EXPECT_EQ(r.out.find("\n50,large,"), r.out.find('\n'));
}

TEST(Cli, Conditional) {
  const std::string one = temp_file("cond_one.csv", "group_id,effect,std_error,weight\ng,0,1,1\n");
  const Result zero = invoke({"conditional", one, "--out", "json"});
  ASSERT_EQ(zero.code, 0) << zero.err;
  EXPECT_EQ(nlohmann::json::parse(zero.out).at("delta").get<double>(), 0.0);

  const std::string bench = temp_file("cond_bench.csv",
                                      "group_id,effect,std_error,weight\ng,0.28016,0.1,5\ng,0.28016,0.1,3\n");
  const Result gain = invoke({"conditional", bench, "--out", "json"});
  ASSERT_EQ(gain.code, 0) << gain.err;
  EXPECT_NEAR(nlohmann::json::parse(gain.out).at("delta").get<double>(), 0.178, 1e-3);

  const std::string missing = temp_file("cond_missing.csv", "group_id,effect\ng,0.1\n");
  const Result m = invoke({"conditional", missing});
  EXPECT_EQ(m.code, kExitParseError);
  EXPECT_NE(m.err.find("std_error"), std::string::npos);

  EXPECT_EQ(invoke({"conditional", one, "--se", "worstcase"}).code, kExitParseError);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"estimate", "/nonexistent/file.csv"}).code, kExitParseError);
  const std::string bad = temp_file("bad.csv", "t\n1.0\nxyz\n");
  const Result parse = invoke({"estimate", bad});
  EXPECT_EQ(parse.code, kExitParseError);
  EXPECT_NE(parse.err.find("line 3"), std::string::npos);
  const std::string low = temp_file("low.csv", "t\n0.1\n0.5\n1.0\n-0.3\n");
  const Result est = invoke({"estimate", low});
  EXPECT_EQ(est.code, kExitEstimationError);
  EXPECT_NE(est.err.find("const-C"), std::string::npos);
  EXPECT_EQ(invoke({"estimate", low, "--scale-by", "papers"}).code, kExitInvalidFlags);
  EXPECT_EQ(invoke({"estimate", low, "--alpha", "2"}).code, kExitInvalidFlags);
  EXPECT_EQ(invoke({"bogus"}).code, kExitInvalidFlags);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST(Cli, OutputFileGetsManifestSidecar) {
  const auto out = (std::filesystem::temp_directory_path() / "powergain_test_out.txt").string();
  std::filesystem::remove(out + ".manifest.json");
  const Result r = invoke({"estimate", kFixtures + "/bimodal_500.csv", "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream sidecar(out + ".manifest.json");
  ASSERT_TRUE(sidecar.good());
  const auto j = nlohmann::json::parse(sidecar);
  EXPECT_EQ(j.at("command").get<std::string>(), "estimate");
  EXPECT_EQ(j.at("config").at("c2").get<double>(), 2.0);
}
