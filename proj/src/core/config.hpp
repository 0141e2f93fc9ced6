#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace evatt {

// Flat key-value experiment config with INI-style sections. Keys are stored
// as "section.key"; entries before any section header are rejected. '#' or
// ';' lines are comments. --set overrides call set() with the dotted form.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text,
                            const std::string& origin = "<config>");

  void set(const std::string& dotted_key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key,
                     const std::string& fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::uint64_t get_seed(const std::string& key) const;  // must be present
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::uint64_t> get_uints(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return map_; }

 private:
  std::map<std::string, std::string> map_;
};

}  // namespace evatt
