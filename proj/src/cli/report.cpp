#include <fmt/format.h>

#include "shiftlog/cli.hpp"

namespace shiftlog::cli {

std::string format_number(double value) { return fmt::format("{}", value); }

void Report::section(const std::string& name) { sections_.push_back({name, {}}); }

void Report::put(const std::string& key, const std::string& value) {
  if (sections_.empty()) section("result");
  // Values stay on one line.
  std::string flat = value;
  for (char& c : flat)
    if (c == '\n' || c == '\r') c = ' ';
  sections_.back().second.emplace_back(key, std::move(flat));
}

void Report::put(const std::string& key, double value) { put(key, format_number(value)); }
void Report::put(const std::string& key, int value) { put(key, std::to_string(value)); }
void Report::put(const std::string& key, std::size_t value) { put(key, std::to_string(value)); }
void Report::put(const std::string& key, bool value) { put(key, std::string(value ? "true" : "false")); }

void Report::append(const Report& other) {
  sections_.insert(sections_.end(), other.sections_.begin(), other.sections_.end());
}

std::optional<std::string> Report::value(const std::string& section, const std::string& key) const {
  for (const auto& [name, entries] : sections_) {
    if (name != section) continue;
    for (const auto& [k, v] : entries)
      if (k == key) return v;
  }
  return std::nullopt;
}

std::string Report::text() const {
  std::string out;
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    if (i > 0) out += '\n';
    out += fmt::format("[{}]\n", sections_[i].first);
    for (const auto& [k, v] : sections_[i].second) out += fmt::format("{} = {}\n", k, v);
  }
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw std::logic_error(fmt::format("csv row has {} fields, header has {}", row.size(), header_.size()));
  }
  rows_.push_back(std::move(row));
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += quote(fields[i]);
  }
  out += "\r\n";
}

}  // namespace

std::string CsvTable::text() const {
  std::string out;
  append_line(out, header_);
  for (const auto& r : rows_) append_line(out, r);
  return out;
}

}  // namespace shiftlog::cli
