#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "covol/cli.hpp"
#include "covol/io.hpp"

using namespace covol;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return testing::TempDir() + "covol_" + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST(Io, FormatDoubleRoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, 2.0 / 3.0, 1e-17, 123456.789, 0.0}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
}

TEST(Io, GridJsonRoundTrip) {
  const ObservationGrid g({0.0, 1.0 / 3.0, 1.0});
  const ObservationGrid back = grid_from_json(grid_to_json(g));
  EXPECT_EQ(back.times(), g.times());
  EXPECT_THROW(grid_from_json(json{{"not", "array"}}), IoError);
}

TEST(Io, IngestFourRowFile) {
  std::istringstream in("series_id,time,value\n1,0,0.5\n1,1,1.5\n2,0,0\n2,1,2\n");
  const auto [s1, s2] = ingest_observations(in);
  EXPECT_EQ(s1.times, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(s1.values, (std::vector<double>{0.5, 1.5}));
  EXPECT_EQ(s2.times, (std::vector<double>{0.0, 1.0}));
}

TEST(Io, IngestErrorsCarryLineNumbers) {
  {
    std::istringstream in("1,0,0\n1,0.7,1\n1,0.5,2\n2,0,0\n2,1,1\n");
    try {
      ingest_observations(in);
      FAIL() << "expected IoError";
    } catch (const IoError& e) {
      EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
  }
  {
    std::istringstream in("1,0,0\n1,0.5,1\n1,0.5,2\n2,0,0\n2,0.5,1\n");
    EXPECT_THROW(ingest_observations(in), IoError);  // duplicate time, line 3
  }
  {
    std::istringstream in("1,0,0\n1,1,1\n2,0,0\n2,0.9,1\n");
    try {
      ingest_observations(in);
      FAIL() << "expected IoError";
    } catch (const IoError& e) {
      EXPECT_NE(std::string(e.what()).find("horizons differ"), std::string::npos);
    }
  }
  {
    std::istringstream in("3,0,0\n");
    EXPECT_THROW(ingest_observations(in), IoError);  // bad series id
  }
}

TEST(Io, ObservationsRoundTrip) {
  ObservedSeries s1{{0.0, 0.25, 1.0}, {0.0, -0.125, 2.0 / 3.0}};
  ObservedSeries s2{{0.0, 1.0}, {1.0, 0.1}};
  std::ostringstream out;
  write_observations(out, s1, s2);
  std::istringstream in(out.str());
  const auto [r1, r2] = ingest_observations(in);
  EXPECT_EQ(r1.times, s1.times);
  EXPECT_EQ(r1.values, s1.values);
  EXPECT_EQ(r2.values, s2.values);
}

TEST(Io, MdpReportCsvSchemaAndEmptyReport) {
  MdpReport empty;
  EXPECT_EQ(mdp_report_csv(empty), "n,b_n,delta,count,R,phat,rescaled,L_theory,lower_bound_flag\n");

  MdpReport r;
  MdpCell c;
  c.n = 100;
  c.b_n = 1.5848931924611136;
  c.delta = 1.0;
  c.count = 42;
  c.replicates = 1000;
  c.phat = 0.042;
  c.rescaled = 1.2621;
  c.L_theory = 0.5;
  c.lower_bound = false;
  r.cells.push_back(c);
  const std::string csv = mdp_report_csv(r);
  EXPECT_NE(csv.find("100,"), std::string::npos);
  EXPECT_NE(csv.find(",42,1000,"), std::string::npos);
  EXPECT_NE(csv.find(",0\n"), std::string::npos);
}

TEST(ParseConfig, MinimalVarianceConfigIsValidAndEchoIsFixedPoint) {
  const std::string cfg_path = temp_path("variance_cfg.json");
  write_file(cfg_path,
             R"({"verb":"variance","model":"constant","sigma1":1,"sigma2":1,"rho":0.5,)"
             R"("scheme":"sync","n":10})");
  const CliRun first = run({"--config", cfg_path});
  ASSERT_EQ(first.code, 0) << first.err;
  // first line is the canonical echo; missing T was defaulted to 1
  const std::string echo = first.out.substr(0, first.out.find('\n'));
  const json canon = json::parse(echo);
  EXPECT_DOUBLE_EQ(canon.at("T").get<double>(), 1.0);
  EXPECT_EQ(canon.at("verb"), "variance");

  // feeding the echo back reproduces it
  const std::string echo_path = temp_path("variance_echo.json");
  write_file(echo_path, echo);
  const CliRun second = run({"--config", echo_path});
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(second.out, first.out);
}

TEST(ParseConfig, RhoOutOfRangeRejectedNamingField) {
  const CliRun r = run({"variance", "--rho", "1.5", "--n", "10"});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_NE(r.err.find("rho"), std::string::npos) << r.err;
}

TEST(ParseConfig, UnknownFieldRejected) {
  const CliRun r = run({"variance", "--sigma3", "2"});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_NE(r.err.find("sigma3"), std::string::npos);
}

TEST(ParseConfig, MissingConfigFileRejected) {
  const CliRun r = run({"variance", "--config", temp_path("does_not_exist.json")});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_NE(r.err.find("does not exist"), std::string::npos);
}

TEST(ParseConfig, EnvSeedOverridesConfig) {
  ::setenv("COVOL_SEED", "777", 1);
  const CliRun r = run({"simulate", "--n", "4", "--seed", "5"});
  ::unsetenv("COVOL_SEED");
  ASSERT_EQ(r.code, 0) << r.err;
  const json canon = json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_EQ(canon.at("seed").get<std::uint64_t>(), 777u);
}

TEST(Cli, VarianceVerbMatchesClosedForm) {
  const CliRun r = run({"variance", "--n", "10", "--rho", "0.5", "--oracle"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string body = r.out.substr(r.out.find('\n') + 1);
  const json j = json::parse(body);
  EXPECT_NEAR(j.at("value").get<double>(), 0.125, 1e-12);
  EXPECT_NEAR(j.at("oracle").get<double>(), 0.125, 1e-10);
  EXPECT_EQ(j.at("method"), "variance-bracket");
  EXPECT_GT(j.at("tolerance").get<double>(), 0.0);
}

TEST(Cli, SigmaVerbMatchesMomentFormula) {
  const CliRun r = run({"sigma", "--g", "abs^1", "--h", "abs^1", "--rho", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out.substr(r.out.find('\n') + 1));
  EXPECT_NEAR(j.at("value").get<double>(), 1.05739, 2e-5);
  EXPECT_NEAR(j.at("limit").get<double>(), 2.0 / std::numbers::pi, 1e-12);
}

TEST(Cli, DesignVerbDumpsWorkedGrids) {
  const std::string gi = temp_path("gridI.json");
  const std::string gj = temp_path("gridJ.json");
  write_file(gi, "[0.0, 0.3333333333333333, 0.6666666666666666, 1.0]");
  write_file(gj, "[0.0, 0.5, 1.0]");
  const CliRun r = run({"design", "--gridI", gi, "--gridJ", gj});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out.substr(r.out.find('\n') + 1));
  EXPECT_EQ(j.at("n_hat").get<int>(), 3);
  EXPECT_EQ(j.at("n0").get<int>(), 1);
  EXPECT_EQ(j.at("tau"), json::array({2}));
  EXPECT_EQ(j.at("j_ranges").size(), 3u);
}

TEST(Cli, SimulateThenEstimatePipeline) {
  const std::string obs = temp_path("obs.csv");
  const CliRun sim =
      run({"simulate", "--scheme", "alt", "--n", "32", "--seed", "9", "--out", obs});
  ASSERT_EQ(sim.code, 0) << sim.err;

  const CliRun est = run({"estimate", "--estimator", "hy", "--input", obs, "--mode", "reduced"});
  ASSERT_EQ(est.code, 0) << est.err;
  const json j = json::parse(est.out.substr(est.out.find('\n') + 1));
  EXPECT_EQ(j.at("estimator"), "hy");
  EXPECT_TRUE(std::isfinite(j.at("value").get<double>()));

  const CliRun direct = run({"estimate", "--estimator", "hy", "--input", obs});
  const json jd = json::parse(direct.out.substr(direct.out.find('\n') + 1));
  EXPECT_NEAR(jd.at("value").get<double>(), j.at("value").get<double>(), 1e-12);

  // estimator v is reserved for simulated paths with a known decomposition
  const CliRun v = run({"estimate", "--estimator", "v", "--input", obs});
  EXPECT_EQ(v.code, cli::kExitConfig);
  EXPECT_NE(v.err.find("hy"), std::string::npos);
}

TEST(Cli, MdpVerbAndReportConversion) {
  const std::string cfg_path = temp_path("mdp_cfg.json");
  write_file(cfg_path,
             R"({"verb":"mdp","target":"mdep","n_list":[100],"deltas":[1.0],)"
             R"("replicates":1000,"seed":3,"alpha":0.1,"beta":1.0})");
  const std::string report_path = temp_path("mdp_report.csv");
  const CliRun r = run({"mdp", "--config", cfg_path, "--out", report_path});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(report_path);
  EXPECT_NE(csv.find("n,b_n,delta"), std::string::npos);
  EXPECT_NE(csv.find("100,"), std::string::npos);

  const CliRun conv = run({"report", "--input", report_path, "--format", "json"});
  ASSERT_EQ(conv.code, 0) << conv.err;
  const json j = json::parse(conv.out.substr(conv.out.find('\n') + 1));
  EXPECT_EQ(j.at("cells").size(), 1u);
  EXPECT_EQ(j.at("cells")[0].at("n").get<int>(), 100);

  // csv -> csv is the identity on the data rows
  const CliRun same = run({"report", "--input", report_path, "--format", "csv"});
  EXPECT_NE(same.out.find(csv), std::string::npos);
}

TEST(Cli, EndToEndDeterminism) {
  const std::string cfg_path = temp_path("det_cfg.json");
  write_file(cfg_path,
             R"({"verb":"mdp","target":"hy_v","scheme":"alt","model":"constant",)"
             R"("sigma1":1,"sigma2":1,"rho":0.5,"n_list":[50],"deltas":[0.5,1.0],)"
             R"("replicates":1000,"seed":21,"alpha":0.1,"beta":1.0,"workers":2})");
  const CliRun a = run({"mdp", "--config", cfg_path});
  const CliRun b = run({"mdp", "--config", cfg_path});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);  // byte-identical

  // worker count does not change the result
  const CliRun c = run({"mdp", "--config", cfg_path, "--workers", "1"});
  const std::string tail_a = a.out.substr(a.out.find('\n') + 1);
  const std::string tail_c = c.out.substr(c.out.find('\n') + 1);
  EXPECT_EQ(tail_a, tail_c);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"unknownverb"}).code, cli::kExitConfig);
  EXPECT_EQ(run({"estimate", "--estimator", "hy", "--input", temp_path("missing.csv")}).code,
            cli::kExitConfig);
  // unwritable output path -> io error
  const std::string obs = temp_path("obs_exit.csv");
  const CliRun sim = run({"simulate", "--n", "4", "--out", obs});
  ASSERT_EQ(sim.code, 0);
  EXPECT_EQ(run({"estimate", "--estimator", "hy", "--input", obs, "--out",
                 "/nonexistent_dir/x.json"})
                .code,
            cli::kExitIo);
}
