#include "rlab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rlab/error.hpp"

namespace rlab {

namespace {

using Keys = std::map<std::string, KeyType>;

Keys surface_keys() {
  return {{"surface.n", KeyType::integer},
          {"surface.kind", KeyType::text},
          {"surface.epsilon", KeyType::real},
          {"surface.seed", KeyType::integer},
          {"surface.domain_radius", KeyType::real}};
}

Keys grid_keys() {
  return {{"grid.dim", KeyType::integer}, {"grid.n", KeyType::integer}, {"grid.box_radius", KeyType::real}};
}

Keys merged(Keys a, const Keys& b) {
  a.insert(b.begin(), b.end());
  return a;
}

const std::map<std::string, Keys>& registry() {
  static const std::map<std::string, Keys> r = {
      {"cgo", merged(grid_keys(), {{"conductivity.amplitude", KeyType::real},
                                   {"conductivity.radius", KeyType::real},
                                   {"conductivity.form", KeyType::text},
                                   {"sweep.tau", KeyType::reals},
                                   {"sweep.samples", KeyType::integer},
                                   {"solver.max_iter", KeyType::integer},
                                   {"solver.tol", KeyType::real},
                                   {"check.min_decreasing", KeyType::real}})},
      {"expectation", merged(grid_keys(), {{"field.axis", KeyType::integer},
                                           {"field.bump_radius", KeyType::real},
                                           {"field.term", KeyType::text},
                                           {"sweep.M", KeyType::reals},
                                           {"sweep.samples", KeyType::integer},
                                           {"power.iters", KeyType::integer},
                                           {"power.tol", KeyType::real},
                                           {"power.restarts", KeyType::integer}})},
      {"bilinear", merged(surface_keys(), {{"sweep.p_prime", KeyType::real},
                                           {"sweep.mu", KeyType::reals},
                                           {"sweep.nu", KeyType::reals},
                                           {"sweep.candidates", KeyType::integer},
                                           {"sweep.regime", KeyType::text},
                                           {"sweep.cap_radius", KeyType::real},
                                           {"check.e_mu", KeyType::real},
                                           {"check.e_nu", KeyType::real},
                                           {"check.tolerance", KeyType::real}})},
      {"wavepacket", merged(surface_keys(), {{"field.R", KeyType::real},
                                             {"field.width", KeyType::real},
                                             {"field.cap_radius", KeyType::real},
                                             {"field.center", KeyType::real},
                                             {"field.h", KeyType::real},
                                             {"field.drop", KeyType::real},
                                             {"audit.xn", KeyType::real},
                                             {"audit.multiples", KeyType::reals},
                                             {"audit.probes", KeyType::integer},
                                             {"check.parseval", KeyType::real},
                                             {"check.reconstruction", KeyType::real},
                                             {"check.decay_order", KeyType::real}})},
      {"kakeya", {{"incidence.n", KeyType::integer},
                  {"incidence.R", KeyType::real},
                  {"incidence.delta", KeyType::real},
                  {"incidence.configs", KeyType::integer},
                  {"incidence.family", KeyType::text},
                  {"incidence.n1", KeyType::integer},
                  {"incidence.n2", KeyType::integer},
                  {"incidence.bush_fraction", KeyType::real},
                  {"incidence.cap_radius", KeyType::real},
                  {"kakeya.C", KeyType::real},
                  {"kakeya.Cdelta", KeyType::real},
                  {"kakeya.constants", KeyType::text}}},
      {"induction", merged(surface_keys(), {{"sweep.nu", KeyType::real},
                                            {"sweep.R", KeyType::reals},
                                            {"sweep.p_prime", KeyType::real},
                                            {"sweep.candidates", KeyType::integer},
                                            {"sweep.cap_radius", KeyType::real},
                                            {"check.max_growth", KeyType::real}})},
  };
  return r;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

[[noreturn]] void parse_error(const std::string& what, int line, const std::string& key = "") {
  std::string msg = key.empty() ? what : "key '" + key + "': " + what;
  throw Error(ErrorKind::ConfigParse, msg + " (line " + std::to_string(line) + ")");
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<double> to_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// Checks and normalises a raw value.
std::string normalise(const std::string& key, KeyType type, const std::string& raw, int line) {
  switch (type) {
    case KeyType::integer: {
      auto v = to_integer(raw);
      if (!v) parse_error("expected an integer, got '" + raw + "'", line, key);
      return std::to_string(*v);
    }
    case KeyType::real: {
      auto v = to_real(raw);
      if (!v) parse_error("expected a finite number, got '" + raw + "'", line, key);
      return format_real(*v);
    }
    case KeyType::reals: {
      std::string out;
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto v = to_real(trim(item));
        if (!v) parse_error("expected a comma-separated list of numbers, got '" + raw + "'", line, key);
        if (!out.empty()) out += ", ";
        out += format_real(*v);
      }
      if (out.empty() || raw.back() == ',') parse_error("empty list entry in '" + raw + "'", line, key);
      return out;
    }
    case KeyType::text:
      return raw;
  }
  return raw;
}

const ConfigEntry* find(const ExperimentConfig& c, const std::string& key) {
  auto it = c.entries.find(key);
  return it == c.entries.end() ? nullptr : &it->second;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"cgo", "expectation", "bilinear", "wavepacket", "kakeya", "induction"};
  return names;
}

const std::map<std::string, KeyType>& config_keys(const std::string& experiment) {
  auto it = registry().find(experiment);
  require(it != registry().end(), ErrorKind::ConfigParse, "unknown experiment '" + experiment + "'");
  return it->second;
}

long long ExperimentConfig::integer(const std::string& key, long long fallback) const {
  const ConfigEntry* e = find(*this, key);
  if (!e) return fallback;
  auto v = to_integer(e->value);
  require(v.has_value(), ErrorKind::InvalidArgument, key + " is not an integer");
  return *v;
}

double ExperimentConfig::real(const std::string& key, double fallback) const {
  const ConfigEntry* e = find(*this, key);
  if (!e) return fallback;
  auto v = to_real(e->value);
  require(v.has_value(), ErrorKind::InvalidArgument, key + " is not a number");
  return *v;
}

std::vector<double> ExperimentConfig::reals(const std::string& key, const std::vector<double>& fallback) const {
  const ConfigEntry* e = find(*this, key);
  if (!e) return fallback;
  std::vector<double> out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = to_real(trim(item));
    require(v.has_value(), ErrorKind::InvalidArgument, key + " is not a list of numbers");
    out.push_back(*v);
  }
  return out;
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  const ConfigEntry* e = find(*this, key);
  return e ? e->value : fallback;
}

std::string ExperimentConfig::canonical() const {
  std::string out = "experiment = " + experiment + "\nseed = " + std::to_string(seed) + "\n";
  for (const auto& [key, e] : entries) out += key + " = " + e.value + "\n";
  return out;
}

ExperimentConfig parse_config(std::string_view text, const std::string& experiment) {
  ExperimentConfig c;
  std::map<std::string, std::pair<std::string, int>> raw;
  std::string section;
  std::stringstream ss{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || !identifier(trim(t.substr(1, t.size() - 2))))
        parse_error("malformed section header '" + t + "'", number);
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) parse_error("expected 'key = value', got '" + t + "'", number);
    std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (!identifier(key)) parse_error("malformed key '" + key + "'", number);
    if (section.empty()) parse_error("key outside a section", number, key);
    std::string full = section + "." + key;
    if (value.empty()) parse_error("missing value", number, full);
    if (raw.count(full)) parse_error("duplicate key", number, full);
    raw[full] = {value, number};
  }

  c.experiment = experiment;
  if (auto it = raw.find("run.experiment"); it != raw.end()) {
    const auto& [value, at] = it->second;
    if (!experiment.empty() && value != experiment)
      parse_error("config is for '" + value + "', not '" + experiment + "'", at, "run.experiment");
    if (!registry().count(value)) parse_error("unknown experiment '" + value + "'", at, "run.experiment");
    c.experiment = value;
    raw.erase(it);
  }
  if (c.experiment.empty()) throw Error(ErrorKind::ConfigParse, "no experiment named (run.experiment)");
  config_keys(c.experiment);
  if (auto it = raw.find("run.seed"); it != raw.end()) {
    const auto& [value, at] = it->second;
    auto v = to_integer(value);
    if (!v || *v < 0) parse_error("expected a non-negative integer, got '" + value + "'", at, "run.seed");
    c.seed = static_cast<std::uint64_t>(*v);
    raw.erase(it);
  }
  if (auto it = raw.find("run.output"); it != raw.end()) {
    c.output = it->second.first;
    raw.erase(it);
  }
  const Keys& keys = config_keys(c.experiment);
  for (const auto& [key, v] : raw) {
    const auto& [value, at] = v;
    auto k = keys.find(key);
    if (k == keys.end()) parse_error("unknown key for experiment '" + c.experiment + "'", at, key);
    c.entries[key] = {k->second, normalise(key, k->second, value, at), at};
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorKind::Io, "cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config(ss.str(), experiment);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace rlab
