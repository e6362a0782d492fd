#include "perclab/config.hpp"

#include <cerrno>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace perclab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

}  // namespace

std::vector<std::string> split_list(std::string_view text, char separator) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(separator, start);
    out.emplace_back(trim(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::int64_t parse_integer(std::string_view text, const std::string& what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(what + ": expected an integer, got '" + std::string(text) + "'");
  return v;
}

double parse_real(std::string_view text, const std::string& what) {
  const std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || std::isnan(v))
    throw ConfigError(what + ": expected a number, got '" + s + "'");
  return v;
}

Config Config::parse(std::string_view text, const std::string& source) {
  Config c;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? text.npos : end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (c.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    c.values_[key] = std::string(trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  values_[key] = std::string(trim(value));
}

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(std::string(trim(std::string_view(assignment).substr(0, eq))), assignment.substr(eq + 1));
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string Config::text(const std::string& key) const { return raw(key); }

std::string Config::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

std::int64_t Config::integer(const std::string& key) const { return parse_integer(raw(key), key); }

std::int64_t Config::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Config::unsigned_integer(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string_view t = trim(raw(key));
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + std::string(t) + "'");
  return v;
}

double Config::real(const std::string& key) const { return parse_real(raw(key), key); }

double Config::real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

std::optional<double> Config::optional_real(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return real(key);
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = raw(key);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key), ',')) out.push_back(parse_real(item, key));
  return out;
}

std::vector<std::int64_t> Config::integers(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(raw(key), ',')) out.push_back(parse_integer(item, key));
  return out;
}

std::vector<std::vector<double>> Config::real_points(const std::string& key) const {
  std::vector<std::vector<double>> out;
  for (const auto& point : split_list(raw(key), ';')) {
    std::vector<double> p;
    for (const auto& c : split_list(point, ',')) p.push_back(parse_real(c, key));
    if (p.empty()) throw ConfigError(key + ": empty point");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<int>> Config::int_points(const std::string& key) const {
  std::vector<std::vector<int>> out;
  for (const auto& point : split_list(raw(key), ';')) {
    std::vector<int> p;
    for (const auto& c : split_list(point, ',')) p.push_back(static_cast<int>(parse_integer(c, key)));
    if (p.empty()) throw ConfigError(key + ": empty point");
    out.push_back(std::move(p));
  }
  return out;
}

void Config::require_known(const std::set<std::string>& known) const {
  for (const auto& [key, value] : values_)
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "'");
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

}  // namespace perclab
