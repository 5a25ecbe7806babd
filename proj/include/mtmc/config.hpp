#pragma once

// Plain-text scenario configuration:
//
//   # comment
//   [section]
//   key = value
//
// Keys are unique within a section, sections are unique within a file.
// Inline comments start with '#' after the value.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mtmc/core.hpp"

namespace mtmc {

/// Invalid configuration. `line` is 0 when the problem is not tied to a line
/// (for example a missing required field).
class ConfigError : public Error {
public:
  ConfigError(std::string source, std::size_t line, std::string field, const std::string& message);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

private:
  std::string source_;
  std::size_t line_;
  std::string field_;
};

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct ConfigSection {
  std::string name;
  std::size_t line = 0;
  std::vector<ConfigEntry> entries;
};

class ConfigDocument {
public:
  static ConfigDocument parse(std::istream& is, std::string source = "<config>");
  static ConfigDocument parse_string(const std::string& text, std::string source = "<config>");
  static ConfigDocument load(const std::string& path);

  const std::string& source() const { return source_; }
  const std::vector<ConfigSection>& sections() const { return sections_; }

  const ConfigSection* section(const std::string& name) const;
  const ConfigEntry* find(const std::string& section, const std::string& key) const;

  /// Adds or replaces a value (used when serializing).
  void set(const std::string& section, const std::string& key, std::string value);

  std::string to_string() const;

private:
  std::string source_;
  std::vector<ConfigSection> sections_;
};

} // namespace mtmc
