#pragma once

// Experiment runner plumbing: sectioned key/value configs with command-line
// overrides, key/value reports with an embedded run manifest, RFC 4180 CSV,
// and one entry point per experiment command.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace shiftlog::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// INI-style configuration. Every typed read records the resolved value
/// (including defaults) so the full effective configuration can be reported.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  /// Sets "section.key" to a raw string value.
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Whitespace or comma separated list.
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
  bool has(const std::string& key) const;

  const std::map<std::string, std::string>& resolved() const { return resolved_; }
  /// Keys present in the file or overrides that no command read.
  std::vector<std::string> unused_keys() const;

 private:
  std::optional<std::string> raw(const std::string& key) const;
  void record(const std::string& key, const std::string& value) const;

  boost::property_tree::ptree tree_;
  mutable std::map<std::string, std::string> resolved_;
};

/// Shortest round-trip-safe decimal form used for every reported number.
std::string format_number(double value);

/// Sectioned key/value text report; sections and keys keep insertion order.
class Report {
 public:
  void section(const std::string& name);
  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, const char* value) { put(key, std::string(value)); }
  void put(const std::string& key, double value);
  void put(const std::string& key, int value);
  void put(const std::string& key, std::size_t value);
  void put(const std::string& key, bool value);
  /// Appends all sections of another report.
  void append(const Report& other);
  /// First value stored under key in the named section.
  std::optional<std::string> value(const std::string& section, const std::string& key) const;
  std::string text() const;

 private:
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
};

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }
  /// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote, CR or LF.
  std::string text() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CommandOutput {
  int status = kExitPass;
  Report report;
  std::optional<CsvTable> csv;
};

const std::vector<std::string>& command_names();

/// Runs one command. Configuration problems raise ConfigError or
/// std::invalid_argument; check failures are reported through `status`.
/// The report starts with the run manifest (command, version, seed, resolved
/// configuration, output paths). An "csv" output entry is listed only when
/// the command produces a table.
CommandOutput run_command(const std::string& name, const Config& config,
                          const std::map<std::string, std::string>& outputs = {});

/// argv-style entry point used by the command-line tool: writes the report to
/// stdout (and files when --out is given) and returns the exit status.
int main_entry(int argc, char** argv);

}  // namespace shiftlog::cli
