#include <algorithm>
#include <charconv>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>

#include "shiftlog/cli.hpp"

namespace shiftlog::cli {

namespace {

using boost::property_tree::ptree;

// property_tree uses '.' as its path separator, which is exactly the
// section.key form used on the command line.
ptree::path_type path_of(const std::string& key) { return ptree::path_type(key, '.'); }

void collect_keys(const ptree& node, const std::string& prefix, std::vector<std::string>& out) {
  for (const auto& [name, child] : node) {
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    if (child.empty()) {
      out.push_back(key);
    } else {
      collect_keys(child, key, out);
    }
  }
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  T value{};
  const std::string trimmed = boost::algorithm::trim_copy(text);
  const auto* end = trimmed.data() + trimmed.size();
  const auto [ptr, ec] = std::from_chars(trimmed.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("config key {}: '{}' is not an integer", key, text));
  }
  return value;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string trimmed = boost::algorithm::trim_copy(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(trimmed, &used);
    if (used != trimmed.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("config key {}: '{}' is not a number", key, text));
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(", \t"), boost::algorithm::token_compress_on);
  parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
  return parts;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  Config c;
  try {
    boost::property_tree::ini_parser::read_ini(path, c.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("cannot parse config {}: {}", path, e.what()));
  }
  return c;
}

Config Config::from_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, c.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("cannot parse config: {}", e.what()));
  }
  return c;
}

void Config::set(const std::string& key, const std::string& value) {
  if (std::count(key.begin(), key.end(), '.') != 1 || key.front() == '.' || key.back() == '.') {
    throw ConfigError(fmt::format("override '{}' must have the form section.key", key));
  }
  tree_.put(path_of(key), value);
}

std::optional<std::string> Config::raw(const std::string& key) const {
  const auto v = tree_.get_optional<std::string>(path_of(key));
  if (!v) return std::nullopt;
  return boost::algorithm::trim_copy(*v);
}

bool Config::has(const std::string& key) const { return raw(key).has_value(); }

void Config::record(const std::string& key, const std::string& value) const { resolved_[key] = value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const std::string v = raw(key).value_or(fallback);
  record(key, v);
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto r = raw(key);
  const double v = r ? parse_double(key, *r) : fallback;
  record(key, format_number(v));
  return v;
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto r = raw(key);
  const int v = r ? parse_integer<int>(key, *r) : fallback;
  record(key, std::to_string(v));
  return v;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto r = raw(key);
  const std::uint64_t v = r ? parse_integer<std::uint64_t>(key, *r) : fallback;
  record(key, std::to_string(v));
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto r = raw(key);
  bool v = fallback;
  if (r) {
    const std::string t = boost::algorithm::to_lower_copy(*r);
    if (t == "true" || t == "yes" || t == "1" || t == "on") {
      v = true;
    } else if (t == "false" || t == "no" || t == "0" || t == "off") {
      v = false;
    } else {
      throw ConfigError(fmt::format("config key {}: '{}' is not a boolean", key, *r));
    }
  }
  record(key, v ? "true" : "false");
  return v;
}

std::vector<std::string> Config::get_list(const std::string& key, const std::vector<std::string>& fallback) const {
  const auto r = raw(key);
  std::vector<std::string> v = r ? split_list(*r) : fallback;
  record(key, boost::algorithm::join(v, " "));
  return v;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const auto r = raw(key);
  std::vector<double> v;
  if (r) {
    for (const auto& s : split_list(*r)) v.push_back(parse_double(key, s));
  } else {
    v = fallback;
  }
  std::vector<std::string> text;
  for (double d : v) text.push_back(format_number(d));
  record(key, boost::algorithm::join(text, " "));
  return v;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  const auto r = raw(key);
  std::vector<int> v;
  if (r) {
    for (const auto& s : split_list(*r)) v.push_back(parse_integer<int>(key, s));
  } else {
    v = fallback;
  }
  std::vector<std::string> text;
  for (int d : v) text.push_back(std::to_string(d));
  record(key, boost::algorithm::join(text, " "));
  return v;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> all, out;
  collect_keys(tree_, "", all);
  for (const auto& k : all)
    if (!resolved_.count(k)) out.push_back(k);
  return out;
}

}  // namespace shiftlog::cli
