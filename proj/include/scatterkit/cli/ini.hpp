#pragma once
#include <string>
#include <utility>
#include <vector>

#include "../core/errors.hpp"

namespace sk {

// configuration text cannot be interpreted: syntax, unknown names, bad types
struct config_error : error {
  using error::error;
};

// Ordered [section] blocks of key = value lines. Order is preserved so that
// serialization is deterministic; '#' and ';' start comment lines.
struct IniDoc {
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::vector<Section> sections;

  const Section* find(const std::string& name) const {
    for (const auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }

  const std::string* get(const std::string& section, const std::string& key) const {
    const Section* s = find(section);
    if (!s) return nullptr;
    for (const auto& e : s->entries)
      if (e.first == key) return &e.second;
    return nullptr;
  }

  void set(const std::string& section, const std::string& key, std::string value) {
    for (auto& s : sections)
      if (s.name == section) {
        for (auto& e : s.entries)
          if (e.first == key) {
            e.second = std::move(value);
            return;
          }
        s.entries.emplace_back(key, std::move(value));
        return;
      }
    sections.push_back({section, {{key, std::move(value)}}});
  }
};

namespace detail {

inline std::string ini_trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline IniDoc parse_ini(const std::string& text) {
  IniDoc doc;
  IniDoc::Section* cur = nullptr;
  size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = detail::ini_trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++lineno;
    const std::string at = " at line " + std::to_string(lineno);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line[0] == '[') {
      if (line.back() != ']')
        throw config_error("malformed section header" + at);
      const std::string name = detail::ini_trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw config_error("empty section name" + at);
      if (doc.find(name))
        throw config_error("duplicate section [" + name + "]" + at);
      doc.sections.push_back({name, {}});
      cur = &doc.sections.back();
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("expected key = value" + at);
    const std::string key = detail::ini_trim(line.substr(0, eq));
    if (key.empty()) throw config_error("empty key" + at);
    if (!cur) throw config_error("key '" + key + "' outside any section" + at);
    for (const auto& e : cur->entries)
      if (e.first == key)
        throw config_error("duplicate key '" + cur->name + "." + key + "'" + at);
    cur->entries.emplace_back(key, detail::ini_trim(line.substr(eq + 1)));
  }
  return doc;
}

inline std::string serialize_ini(const IniDoc& doc) {
  std::string out;
  for (size_t i = 0; i < doc.sections.size(); ++i) {
    if (i) out += '\n';
    out += '[' + doc.sections[i].name + "]\n";
    for (const auto& e : doc.sections[i].entries)
      out += e.first + " = " + e.second + '\n';
  }
  return out;
}

}  // namespace sk
