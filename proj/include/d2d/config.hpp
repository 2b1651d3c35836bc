#pragma once

#include <map>
#include <string>

namespace d2d::harness {

// Flat-key INI-style configuration: [section] headers, key = value lines,
// '#' or ';' comments. Values stay strings until queried.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config load_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key,
           const std::string& value);

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long get_int(const std::string& section, const std::string& key,
               long fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections()
      const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace d2d::harness
