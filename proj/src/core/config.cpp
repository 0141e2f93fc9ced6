#include "core/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace evatt {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str(), path);
}

Config Config::from_string(const std::string& text,
                           const std::string& origin) {
  Config cfg;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        fail(ErrorKind::Parse, origin + ":" + std::to_string(line_no) +
                                   ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        fail(ErrorKind::Parse, origin + ":" + std::to_string(line_no) +
                                   ": empty section name");
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Parse, origin + ":" + std::to_string(line_no) +
                                 ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      fail(ErrorKind::Parse,
           origin + ":" + std::to_string(line_no) + ": empty key");
    if (section.empty())
      fail(ErrorKind::Parse, origin + ":" + std::to_string(line_no) +
                                 ": key outside any [section]");
    cfg.map_[section + "." + key] = value;
  }
  return cfg;
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  const std::size_t dot = dotted_key.find('.');
  if (dot == 0 || dot == std::string::npos || dot + 1 == dotted_key.size())
    fail(ErrorKind::Parse,
         "config key must be 'section.key', got '" + dotted_key + "'");
  map_[dotted_key] = value;
}

bool Config::has(const std::string& key) const { return map_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
  auto it = map_.find(key);
  if (it == map_.end())
    fail(ErrorKind::Config, "config is missing key '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key,
                           const std::string& fallback) const {
  auto it = map_.find(key);
  return it == map_.end() ? fallback : it->second;
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string v = get(key);
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    fail(ErrorKind::Config, "config key '" + key + "' is not an integer: '" +
                                v + "'");
  return out;
}

std::int64_t Config::get_int_or(const std::string& key,
                                std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    fail(ErrorKind::Config,
         "config key '" + key + "' is not a number: '" + v + "'");
  }
}

double Config::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool Config::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::Config, "config key '" + key + "' is not a boolean: '" + v +
                              "'");
}

std::uint64_t Config::get_seed(const std::string& key) const {
  if (!has(key))
    fail(ErrorKind::Config,
         "config must pin '" + key + "' (no implicit nondeterminism)");
  const std::int64_t v = get_int(key);
  if (v < 0) fail(ErrorKind::Config, "seed must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const std::string v = get(key);
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(ErrorKind::Config,
           "config key '" + key + "' has a bad number: '" + item + "'");
    }
  }
  if (out.empty())
    fail(ErrorKind::Config, "config key '" + key + "' lists no values");
  return out;
}

std::vector<std::uint64_t> Config::get_uints(const std::string& key) const {
  const std::string v = get(key);
  std::vector<std::uint64_t> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const long long x = std::stoll(item);
      if (x < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::uint64_t>(x));
    } catch (const std::exception&) {
      fail(ErrorKind::Config,
           "config key '" + key + "' has a bad entry: '" + item + "'");
    }
  }
  if (out.empty())
    fail(ErrorKind::Config, "config key '" + key + "' lists no values");
  return out;
}

}  // namespace evatt
