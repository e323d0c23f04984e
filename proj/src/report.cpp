#include "hypar/report.hpp"

#include <cstdio>
#include <fstream>

#include "hypar/errors.hpp"

namespace hypar {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config;
  j["results"] = results;
  j["versions"] = {{"hypar", "0.1.0"}, {"report_format", 1}};
  j["wall_time_s"] = wall_time_s;
  return j;
}

void Report::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw input_error("cannot write report: " + path);
  os << to_json().dump(1, ' ') << "\n";
}

void Csv::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw invariant_error("csv: row width mismatch");
  rows_.push_back(std::move(row));
}

void Csv::add_numeric_row(const std::vector<double>& row) {
  std::vector<std::string> out;
  out.reserve(row.size());
  for (double v : row) out.push_back(format_g17(v));
  add_row(std::move(out));
}

std::string Csv::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    out += header_[i];
    out += i + 1 == header_.size() ? '\n' : ',';
  }
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += row[i];
      out += i + 1 == row.size() ? '\n' : ',';
    }
  }
  return out;
}

void Csv::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw input_error("cannot write csv: " + path);
  os << str();
}

}  // namespace hypar
