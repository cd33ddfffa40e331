#pragma once

// Flat "key = value" configuration with [section] headers. Keys are stored
// as "section.key"; '#' and ';' start comments.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace slmap_cli {

class Config {
 public:
  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open config file '" + path + "'");
    Config cfg;
    std::string line, section;
    while (std::getline(in, line)) {
      const auto cut = line.find_first_of("#;");
      if (cut != std::string::npos) line = line.substr(0, cut);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("malformed config line: " + line);
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      const std::string full = section.empty() ? key : section + "." + key;
      cfg.values_[full] = value;
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("missing config key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stod(it->second);
  }

  long get_int(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stol(it->second);
  }

  // "re im" pair
  std::pair<double, double> get_pair(const std::string& key,
                                     std::pair<double, double> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::istringstream ss(it->second);
    double re = 0.0, im = 0.0;
    ss >> re >> im;
    if (ss.fail()) throw std::runtime_error("expected 're im' pair for '" + key + "'");
    return {re, im};
  }

  std::vector<double> get_list(const std::string& key) const {
    std::vector<double> out;
    const auto it = values_.find(key);
    if (it == values_.end()) return out;
    std::string item;
    std::istringstream ss(it->second);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.begin();
    auto e = s.end();
    while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
    return std::string(b, e);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace slmap_cli
