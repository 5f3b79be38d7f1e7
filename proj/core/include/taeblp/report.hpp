#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "taeblp/stats.hpp"

namespace taeblp {

/// Columnar table written as CSV; doubles use "%.17g".
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Result of one experiment run. Field order is preserved in the output.
struct ExperimentReport {
  std::string name;
  std::string tag;  ///< short label of the identity being reproduced
  std::vector<std::pair<std::string, Estimate>> estimates;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, double>> checks;  ///< derived scalars (TV, slope, ...)
  std::vector<std::string> notes;
  std::uint64_t seed = 0;
  std::uint64_t replicas = 0;
  std::uint64_t contaminated = 0;
  bool valid = true;
  Table table;

  double contamination() const noexcept {
    return replicas ? static_cast<double>(contaminated) / static_cast<double>(replicas) : 0.0;
  }
  void estimate(const std::string& key, Estimate e) { estimates.emplace_back(key, e); }
  void check(const std::string& key, double v) { checks.emplace_back(key, v); }
  void echo(const std::string& key, const std::string& value) { config.emplace_back(key, value); }
  void echo(const std::string& key, double value);

  /// Value of a named estimate; throws InternalError if absent.
  const Estimate& at(const std::string& key) const;
  double check_value(const std::string& key) const;
};

std::string format_double(double x);

void write_csv(std::ostream& os, const ExperimentReport& report);
void write_json(std::ostream& os, const ExperimentReport& report);

/// Writes `<stem>.csv` and `<stem>.json` into `dir` and returns both paths.
std::pair<std::filesystem::path, std::filesystem::path> write_report_files(
    const ExperimentReport& report, const std::filesystem::path& dir, const std::string& stem);

}  // namespace taeblp
