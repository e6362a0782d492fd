#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace perclab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat "key = value" text. '#' starts a comment; blank lines are ignored;
// a key may appear once. Lists separate items with ','; lists of points
// separate points with ';' and coordinates with ','.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<text>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  // "key=value"
  void set_assignment(const std::string& assignment);
  void erase(const std::string& key) { values_.erase(key); }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const;
  double real(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  std::optional<double> optional_real(const std::string& key) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& key) const;
  std::vector<std::vector<double>> real_points(const std::string& key) const;
  std::vector<std::vector<int>> int_points(const std::string& key) const;

  // throws ConfigError naming the first key not in `known`
  void require_known(const std::set<std::string>& known) const;
  // sorted "key = value" lines; parse(canonical()) reproduces the config
  std::string canonical() const;

 private:
  const std::string& raw(const std::string& key) const;
  std::map<std::string, std::string> values_;
};

std::vector<std::string> split_list(std::string_view text, char separator);
std::int64_t parse_integer(std::string_view text, const std::string& what);
double parse_real(std::string_view text, const std::string& what);

}  // namespace perclab
