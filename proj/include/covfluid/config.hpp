#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covfluid/scenes.hpp"

namespace covfluid {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Parse, UnknownKey, Range, Io };
  ConfigError(Kind kind, int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        kind_(kind),
        line_(line) {}
  Kind kind() const { return kind_; }
  int line() const { return line_; }  // 0 when not tied to a file line

 private:
  Kind kind_;
  int line_;
};

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses flat `key = value` text with `#` comments. Scene defaults are
/// applied first, then file values, then overrides (which may change the scene).
SceneConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides = {});
SceneConfig parse_config(const std::string& path, const ConfigOverrides& overrides = {});

/// Every key with its resolved value, in a fixed order, parseable by parse_config_text.
void write_resolved_config(std::ostream& os, const SceneConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace covfluid
