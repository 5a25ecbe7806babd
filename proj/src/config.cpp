#include "mtmc/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mtmc {

namespace {

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool valid_name(const std::string& name)
{
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::string describe(const std::string& source, std::size_t line, const std::string& field, const std::string& message)
{
  std::string out = source;
  if (line > 0) out += ":" + std::to_string(line);
  out += ": ";
  if (!field.empty()) out += "field '" + field + "': ";
  return out + message;
}

} // namespace

ConfigError::ConfigError(std::string source, std::size_t line, std::string field, const std::string& message)
    : Error(describe(source, line, field, message)), source_(std::move(source)), line_(line), field_(std::move(field))
{
}

ConfigDocument ConfigDocument::parse(std::istream& is, std::string source)
{
  ConfigDocument doc;
  doc.source_ = std::move(source);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(doc.source_, line_no, "", "unterminated section header");
      const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_name(name)) throw ConfigError(doc.source_, line_no, name, "invalid section name");
      if (doc.section(name) != nullptr) throw ConfigError(doc.source_, line_no, name, "duplicate section");
      doc.sections_.push_back({name, line_no, {}});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(doc.source_, line_no, "", "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (doc.sections_.empty()) throw ConfigError(doc.source_, line_no, key, "key outside of any section");
    auto& section = doc.sections_.back();
    const std::string field = section.name + "." + key;
    if (!valid_name(key)) throw ConfigError(doc.source_, line_no, field, "invalid key");
    const bool duplicate = std::any_of(section.entries.begin(), section.entries.end(),
                                       [&](const ConfigEntry& e) { return e.key == key; });
    if (duplicate) throw ConfigError(doc.source_, line_no, field, "duplicate key");
    section.entries.push_back({key, value, line_no});
  }
  return doc;
}

ConfigDocument ConfigDocument::parse_string(const std::string& text, std::string source)
{
  std::istringstream is(text);
  return parse(is, std::move(source));
}

ConfigDocument ConfigDocument::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "", "cannot open config file");
  return parse(in, path);
}

const ConfigSection* ConfigDocument::section(const std::string& name) const
{
  for (const auto& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const ConfigEntry* ConfigDocument::find(const std::string& section_name, const std::string& key) const
{
  const ConfigSection* s = section(section_name);
  if (s == nullptr) return nullptr;
  for (const auto& e : s->entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

void ConfigDocument::set(const std::string& section_name, const std::string& key, std::string value)
{
  auto it = std::find_if(sections_.begin(), sections_.end(), [&](const auto& s) { return s.name == section_name; });
  if (it == sections_.end()) {
    sections_.push_back({section_name, 0, {}});
    it = std::prev(sections_.end());
  }
  for (auto& e : it->entries) {
    if (e.key == key) {
      e.value = std::move(value);
      return;
    }
  }
  it->entries.push_back({key, std::move(value), 0});
}

std::string ConfigDocument::to_string() const
{
  std::string out;
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    if (i > 0) out += '\n';
    out += "[" + sections_[i].name + "]\n";
    for (const auto& e : sections_[i].entries) out += e.key + " = " + e.value + "\n";
  }
  return out;
}

} // namespace mtmc
