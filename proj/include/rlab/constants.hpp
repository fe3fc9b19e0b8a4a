#pragma once

#include <map>
#include <string>

namespace rlab {

// Frozen calibration constants, stored as `name = value` lines ('#' starts a comment).
struct Constants {
  std::map<std::string, double> values;

  // Errors: InvalidArgument naming the missing constant.
  double get(const std::string& name) const;
  bool has(const std::string& name) const { return values.count(name) != 0; }
};

// Errors: Io if the file cannot be read, ConfigParse naming the line.
Constants load_constants(const std::string& path);
// Writes names in sorted order with %.17g values. Errors: Unwritable.
void save_constants(const std::string& path, const Constants& constants, const std::string& header = "");

// $RLAB_CONSTANTS if set, else the path baked in at build time.
std::string default_constants_path();

}  // namespace rlab
