#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "run_config.hpp"

namespace cli {

inline constexpr int schema_version = 1;

/// Writes to a sibling temporary file, then renames it over the target.
inline void atomic_write(const std::filesystem::path& target, const std::string& bytes) {
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw config_error("cannot write '" + tmp.string() + "'");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    os.flush();
    if (!os) throw config_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

/// Quotes a CSV field when it holds a comma, quote or newline.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  template <class... T>
  void add(const T&... v) {
    std::vector<std::string> cells{cell(v)...};
    row(cells);
  }

  [[nodiscard]] const std::string& text() const { return text_; }

 private:
  static std::string cell(const std::string& s) { return csv_field(s); }
  static std::string cell(const char* s) { return csv_field(s); }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  template <class T>
  static std::string cell(const T& v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("CsvTable: row width differs from the header");
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += '\n';
  }

  std::size_t columns_;
  std::string text_;
};

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw config_error("cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, const std::string& bytes) const { atomic_write(dir_ / name, bytes); }
  void write_csv(const std::string& name, const CsvTable& t) const { write(name, t.text()); }
  void write_json(const std::string& name, const nlohmann::json& j) const { write(name, j.dump(2) + "\n"); }

  [[nodiscard]] const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace cli
