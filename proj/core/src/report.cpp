#include "taeblp/report.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "taeblp/errors.hpp"
#include "taeblp/version.hpp"

namespace taeblp {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void ExperimentReport::echo(const std::string& key, double value) {
  config.emplace_back(key, format_double(value));
}

const Estimate& ExperimentReport::at(const std::string& key) const {
  for (const auto& [k, e] : estimates)
    if (k == key) return e;
  throw InternalError("report " + name + " has no estimate " + key);
}

double ExperimentReport::check_value(const std::string& key) const {
  for (const auto& [k, v] : checks)
    if (k == key) return v;
  throw InternalError("report " + name + " has no check " + key);
}

void write_csv(std::ostream& os, const ExperimentReport& report) {
  os << "# " << report.name << " seed=" << report.seed << " version=" << version();
  for (const auto& [k, v] : report.config) os << ' ' << k << '=' << v;
  os << '\n';
  for (std::size_t k = 0; k < report.table.header.size(); ++k)
    os << (k ? "," : "") << report.table.header[k];
  os << '\n';
  for (const auto& row : report.table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_double(row[k]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const ExperimentReport& report) {
  using json = nlohmann::ordered_json;
  json j;
  j["name"] = report.name;
  j["tag"] = report.tag;
  json est = json::object();
  json se = json::object();
  for (const auto& [k, e] : report.estimates) {
    est[k] = e.value;
    se[k] = e.se;
  }
  j["estimates"] = est;
  j["stderrs"] = se;
  json checks = json::object();
  for (const auto& [k, v] : report.checks) checks[k] = v;
  j["checks"] = checks;
  json cfg = json::object();
  for (const auto& [k, v] : report.config) cfg[k] = v;
  j["config"] = cfg;
  j["seed"] = report.seed;
  j["contamination"] = {{"replicas", report.replicas},
                        {"contaminated", report.contaminated},
                        {"fraction", report.contamination()},
                        {"valid", report.valid}};
  j["notes"] = report.notes;
  j["version"] = std::string(version());
  os << j.dump(2) << '\n';
}

std::pair<std::filesystem::path, std::filesystem::path> write_report_files(
    const ExperimentReport& report, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto csv = dir / (stem + ".csv");
  const auto js = dir / (stem + ".json");
  std::ofstream c(csv, std::ios::binary);
  std::ofstream j(js, std::ios::binary);
  if (!c || !j) throw std::runtime_error("cannot open output files in " + dir.string());
  write_csv(c, report);
  write_json(j, report);
  if (!c || !j) throw std::runtime_error("write failed in " + dir.string());
  return {csv, js};
}

}  // namespace taeblp
