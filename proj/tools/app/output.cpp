#include "output.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#ifndef QPSPEC_VERSION
#define QPSPEC_VERSION "unknown"
#endif

namespace qpcli {

using nlohmann::json;
using nlohmann::ordered_json;

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("Table::add: column count mismatch");
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string index_string(const qps::Index& n) {
  std::string s;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(n[i]);
  }
  return s;
}

namespace {

std::string csv_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

ordered_json json_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return std::isfinite(*d) ? ordered_json(*d) : ordered_json(format_double(*d));
  if (const long long* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

OutputDir::OutputDir(std::string dir, Format format) : dir_(std::move(dir)), format_(format) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir_ + "': " + ec.message());
}

std::string OutputDir::write_text(const std::string& name, const std::string& text) {
  auto path = std::filesystem::path(dir_) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  files_.push_back(name);
  return name;
}

std::string OutputDir::write_table(const std::string& stem, const Table& t) {
  if (format_ == Format::json) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json obj = ordered_json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
      arr.push_back(std::move(obj));
    }
    return write_text(stem + ".json", arr.dump(2) + "\n");
  }
  std::string text;
  for (std::size_t i = 0; i < t.columns.size(); ++i) text += (i ? "," : "") + t.columns[i];
  text += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + csv_cell(row[i]);
    text += '\n';
  }
  return write_text(stem + ".csv", text);
}

std::string OutputDir::write_json(const std::string& name, const json& j) {
  return write_text(name, j.dump(2) + "\n");
}

Manifest::Manifest(std::string command, const json& config)
    : command_(std::move(command)), digest_(hex64(digest(config))) {}

void Manifest::stage_done(const StageTimer& t) {
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t.start).count();
  stages_.push_back({{"stage", t.name}, {"wall_seconds", secs}});
}

void Manifest::write(OutputDir& out) const {
  json m;
  m["command"] = command_;
  m["config_digest"] = digest_;
  m["version"] = QPSPEC_VERSION;
  m["stages"] = stages_;
  m["files"] = out.files();
  out.write_json("manifest.json", m);
}

}  // namespace qpcli
