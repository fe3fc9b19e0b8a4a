#include "rlab/constants.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rlab/error.hpp"

#ifndef RLAB_DEFAULT_CONSTANTS
#define RLAB_DEFAULT_CONSTANTS "data/constants.txt"
#endif

namespace rlab {

namespace {
std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace

double Constants::get(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw Error(ErrorKind::InvalidArgument, "missing calibration constant '" + name + "'");
  return it->second;
}

Constants load_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read constants file " + path);
  Constants c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    std::string where = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(ErrorKind::ConfigParse, where + ": expected 'name = value'");
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    char* end = nullptr;
    double v = std::strtod(val.c_str(), &end);
    if (key.empty() || val.empty() || *end != '\0')
      throw Error(ErrorKind::ConfigParse, where + ": bad value for '" + key + "'");
    c.values[key] = v;
  }
  return c;
}

void save_constants(const std::string& path, const Constants& constants, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Unwritable, "cannot write constants file " + path);
  if (!header.empty()) {
    std::istringstream h(header);
    std::string line;
    while (std::getline(h, line)) out << "# " << line << "\n";
  }
  char buf[64];
  for (const auto& [k, v] : constants.values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << k << " = " << buf << "\n";
  }
  if (!out) throw Error(ErrorKind::Unwritable, "failed writing " + path);
}

std::string default_constants_path() {
  if (const char* env = std::getenv("RLAB_CONSTANTS")) return env;
  return RLAB_DEFAULT_CONSTANTS;
}

}  // namespace rlab
