#include "d2d/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace d2d::harness {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    cfg.sections_[section][lower(trim(line.substr(0, eq)))] =
        trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto sec = sections_.find(lower(section));
  return sec != sections_.end() && sec->second.count(lower(key)) > 0;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  sections_[lower(section)][lower(key)] = value;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) const {
  const auto sec = sections_.find(lower(section));
  if (sec == sections_.end()) return fallback;
  const auto it = sec->second.find(lower(key));
  return it == sec->second.end() ? fallback : it->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = get_string(section, key, "");
  size_t used = 0;
  const double value = std::stod(raw, &used);
  if (used != raw.size()) {
    throw std::invalid_argument("config key " + section + "." + key +
                                ": not a number: " + raw);
  }
  return value;
}

long Config::get_int(const std::string& section, const std::string& key,
                     long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = get_string(section, key, "");
  size_t used = 0;
  const long value = std::stol(raw, &used);
  if (used != raw.size()) {
    throw std::invalid_argument("config key " + section + "." + key +
                                ": not an integer: " + raw);
  }
  return value;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = lower(get_string(section, key, ""));
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw std::invalid_argument("config key " + section + "." + key +
                              ": not a boolean: " + raw);
}

}  // namespace d2d::harness
