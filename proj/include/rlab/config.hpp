#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rlab {

enum class KeyType { integer, real, reals, text };

struct ConfigEntry {
  KeyType type = KeyType::text;
  std::string value;  // normalised text
  int line = 0;
};

// Run description. Parameters are addressed as "section.key".
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::optional<std::string> output;
  std::map<std::string, ConfigEntry> entries;

  bool has(const std::string& key) const { return entries.count(key) != 0; }
  long long integer(const std::string& key, long long fallback) const;
  double real(const std::string& key, double fallback) const;
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;

  // Sorted `key = value` lines with experiment and seed first; the output
  // directory is left out.
  std::string canonical() const;
};

const std::vector<std::string>& experiment_names();
// Keys accepted for an experiment, besides run.experiment, run.seed and run.output.
// Errors: ConfigParse for an unknown experiment.
const std::map<std::string, KeyType>& config_keys(const std::string& experiment);

// Text format: `[section]` headers, `key = value` lines, '#' comments; lists are
// comma separated. `experiment` fills in run.experiment when the text has none.
// Errors: ConfigParse naming the offending key (if any) and line.
ExperimentConfig parse_config(std::string_view text, const std::string& experiment = "");
// Errors: Io if unreadable, otherwise as parse_config.
ExperimentConfig load_config(const std::string& path, const std::string& experiment = "");

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace rlab
