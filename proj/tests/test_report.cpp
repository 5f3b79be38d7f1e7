#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "taeblp/errors.hpp"
#include "taeblp/report.hpp"

using namespace taeblp;

namespace {

ExperimentReport sample_report() {
  ExperimentReport r;
  r.name = "demo";
  r.tag = "demo identity";
  r.seed = 7;
  r.replicas = 1000;
  r.contaminated = 2;
  r.echo("beta", 1.0);
  r.echo("mode", "any");
  r.estimate("mean_Q", {0.1, 0.01});
  r.check("tv", 0.005);
  r.table.header = {"k", "count"};
  r.table.rows = {{0, 10}, {1, 0.1}};
  return r;
}

}  // namespace

TEST(Report, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Report, Accessors) {
  const ExperimentReport r = sample_report();
  EXPECT_DOUBLE_EQ(r.at("mean_Q").se, 0.01);
  EXPECT_DOUBLE_EQ(r.check_value("tv"), 0.005);
  EXPECT_DOUBLE_EQ(r.contamination(), 0.002);
  EXPECT_THROW(r.at("missing"), InternalError);
  EXPECT_THROW(r.check_value("missing"), InternalError);
}

TEST(Report, CsvLayout) {
  std::ostringstream os;
  write_csv(os, sample_report());
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.rfind("# demo seed=7 version=", 0), 0u);
  EXPECT_NE(line.find(" beta=1 mode=any"), std::string::npos);
  std::getline(is, line);
  EXPECT_EQ(line, "k,count");
  std::getline(is, line);
  EXPECT_EQ(line, "0,10");
  std::getline(is, line);
  EXPECT_EQ(line, "1,0.10000000000000001");
}

TEST(Report, JsonFields) {
  std::ostringstream os;
  write_json(os, sample_report());
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j["name"], "demo");
  EXPECT_EQ(j["tag"], "demo identity");
  EXPECT_DOUBLE_EQ(j["estimates"]["mean_Q"].get<double>(), 0.1);
  EXPECT_DOUBLE_EQ(j["stderrs"]["mean_Q"].get<double>(), 0.01);
  EXPECT_DOUBLE_EQ(j["checks"]["tv"].get<double>(), 0.005);
  EXPECT_EQ(j["config"]["mode"], "any");
  EXPECT_EQ(j["contamination"]["contaminated"], 2);
  EXPECT_TRUE(j["contamination"]["valid"].get<bool>());
  EXPECT_TRUE(j.contains("version"));
}
