#pragma once

#include <chrono>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace qpcli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// 17 significant digits, '.' decimal point regardless of locale.
std::string format_double(double v);
std::string index_string(const qps::Index& n);  // "1" or "1;-2"

class OutputDir {
 public:
  OutputDir(std::string dir, Format format);

  /// stem.csv or stem.json depending on the format; returns the file name.
  std::string write_table(const std::string& stem, const Table& t);
  std::string write_json(const std::string& name, const nlohmann::json& j);
  const std::vector<std::string>& files() const { return files_; }
  const std::string& dir() const { return dir_; }

 private:
  std::string write_text(const std::string& name, const std::string& text);

  std::string dir_;
  Format format_;
  std::vector<std::string> files_;
};

struct StageTimer {
  std::string name;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

class Manifest {
 public:
  Manifest(std::string command, const nlohmann::json& config);
  void stage_done(const StageTimer& t);
  /// manifest.json, listing every file the command wrote.
  void write(OutputDir& out) const;

 private:
  std::string command_;
  std::string digest_;
  nlohmann::json stages_ = nlohmann::json::array();
};

}  // namespace qpcli
