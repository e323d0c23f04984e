#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace hypar {

// Every command emits one JSON report (self-contained for reproduction) and
// usually one CSV of row data.  CSV numbers are printed with %.17g so a rerun
// reproduces them byte for byte.
struct Report {
  std::string command;
  nlohmann::json config;
  nlohmann::json results;
  double wall_time_s = 0.0;

  nlohmann::json to_json() const;
  void write(const std::string& path) const;
};

std::string format_g17(double v);

// Minimal CSV writer: fixed header, rows of preformatted fields.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> row);
  void add_numeric_row(const std::vector<double>& row);
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace hypar
