// Flat key=value configuration files with [section] headers, typed accessors,
// and a stable 64-bit content hash stamped into every output table.

#ifndef PME_CONFIG_HPP
#define PME_CONFIG_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace pme {

/// FNV-1a 64-bit hash of a byte string.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// 16-digit lowercase hex rendering of a 64-bit hash.
inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Key=value configuration. Section headers `[name]` are organizational only:
// keys live in a single flat namespace and must be unique across the file.
class Config {
 public:
  Config() = default;

  /// Parses configuration text. The raw bytes are retained for hashing.
  static Config parse(const std::string& text, const std::string& origin = "<string>") {
    Config cfg;
    cfg.raw_ = text;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw parse_error(origin + ":" + std::to_string(lineno) + ": malformed section header '" + line + "'");
        continue;  // sections carry no semantics
      }
      std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw parse_error(origin + ":" + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
      std::string key = detail::trim(line.substr(0, eq));
      std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty())
        throw parse_error(origin + ":" + std::to_string(lineno) + ": empty key");
      if (cfg.values_.count(key))
        throw parse_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  /// Loads a configuration file from disk.
  static Config load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
  }

  /// Hash of the raw configuration bytes; identical files hash identically.
  std::uint64_t hash() const { return fnv1a64(raw_); }
  std::string hash_string() const { return hash_hex(hash()); }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  /// Value of a required key; the error names the missing key.
  const std::string& require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      throw parse_error(origin_ + ": missing required key '" + key + "'");
    return it->second;
  }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
  }

  double require_double(const std::string& key) const { return to_double(key, require(key)); }

  double double_or(const std::string& key, double fallback) const {
    auto v = get(key);
    return v ? to_double(key, *v) : fallback;
  }

  std::optional<double> get_double(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    return to_double(key, *v);
  }

  std::size_t require_index(const std::string& key) const { return to_index(key, require(key)); }

  std::size_t index_or(const std::string& key, std::size_t fallback) const {
    auto v = get(key);
    return v ? to_index(key, *v) : fallback;
  }

  /// Boolean flags accept on/off, true/false, 1/0.
  bool flag_or(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "on" || *v == "true" || *v == "1") return true;
    if (*v == "off" || *v == "false" || *v == "0") return false;
    throw parse_error(origin_ + ": key '" + key + "' expects on/off, got '" + *v + "'");
  }

  /// Comma-separated list of numbers; missing key yields empty list.
  std::vector<double> double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split_list(key)) out.push_back(to_double(key, item));
    return out;
  }

  /// Comma-separated list of positive integers; missing key yields empty list.
  std::vector<std::size_t> index_list(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const std::string& item : split_list(key)) out.push_back(to_index(key, item));
    return out;
  }

  /// Comma-separated list of tokens; missing key yields empty list.
  std::vector<std::string> string_list(const std::string& key) const { return split_list(key); }

  const std::string& origin() const { return origin_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  double to_double(const std::string& key, const std::string& text) const {
    try {
      std::size_t pos = 0;
      double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw parse_error(origin_ + ": key '" + key + "' expects a number, got '" + text + "'");
    }
  }

  std::size_t to_index(const std::string& key, const std::string& text) const {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(text, &pos);
      if (pos != text.size() || v <= 0) throw std::invalid_argument(text);
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw parse_error(origin_ + ": key '" + key + "' expects a positive integer, got '" + text + "'");
    }
  }

  std::vector<std::string> split_list(const std::string& key) const {
    std::vector<std::string> out;
    auto v = get(key);
    if (!v) return out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  std::string raw_;
  std::string origin_ = "<empty>";
  std::map<std::string, std::string> values_;
};

}  // namespace pme

#endif  // PME_CONFIG_HPP
