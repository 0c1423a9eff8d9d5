#pragma once
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "../core/errors.hpp"
#include "../core/util.hpp"
#include "config.hpp"
#include "ini.hpp"

namespace sk {

inline constexpr const char* kCodeVersion = "scatterkit 0.1.0";

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> r) {
    if (r.size() != columns.size())
      throw invalid_argument_error("table " + name + ": row width mismatch");
    rows.push_back(std::move(r));
  }
};

struct ResultBundle {
  std::string experiment;
  IniDoc config_echo;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::pair<std::string, std::uint64_t>> grid_hashes;

  Table& add_table(std::string name, std::vector<std::string> columns) {
    tables.push_back({std::move(name), std::move(columns), {}});
    return tables.back();
  }

  void add_scalar(std::string name, double value) {
    summary.emplace_back(std::move(name), value);
  }

  void add_hash(std::string name, std::uint64_t h) {
    grid_hashes.emplace_back(std::move(name), h);
  }
};

namespace detail {

inline std::string hex16(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\', out += ch;
    else if (ch == '\n') out += "\\n";
    else if (ch == '\t') out += "\\t";
    else if (static_cast<unsigned char>(ch) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", ch);
      out += buf;
    } else out += ch;
  }
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    out += ch;
    if (ch == '"') out += '"';
  }
  return out + "\"";
}

}  // namespace detail

// Appends a single-row table mirroring the summary, so that every summary
// scalar is guaranteed to appear in a table.
inline void finalize_bundle(ResultBundle& b) {
  for (const auto& t : b.tables)
    for (const auto& r : t.rows)
      for (double v : r)
        if (!std::isfinite(v))
          throw numerical_error("non-finite value in table " + t.name);
  for (const auto& s : b.summary)
    if (!std::isfinite(s.second))
      throw numerical_error("non-finite summary scalar " + s.first);
  Table& t = b.add_table("summary", {});
  std::vector<double> row;
  for (const auto& s : b.summary) {
    t.columns.push_back(s.first);
    row.push_back(s.second);
  }
  t.rows.push_back(std::move(row));
}

inline bool summary_covered(const ResultBundle& b) {
  for (const auto& s : b.summary) {
    bool found = false;
    for (const auto& t : b.tables)
      for (const auto& r : t.rows)
        for (double v : r)
          found = found || v == s.second;
    if (!found) return false;
  }
  return true;
}

inline std::string render_csv(const Table& t) {
  std::string out;
  for (size_t j = 0; j < t.columns.size(); ++j)
    out += (j ? "," : "") + detail::csv_field(t.columns[j]);
  out += '\n';
  for (const auto& r : t.rows) {
    for (size_t j = 0; j < r.size(); ++j)
      out += (j ? "," : "") + format_g17(r[j]);
    out += '\n';
  }
  return out;
}

inline std::string render_summary_json(const ResultBundle& b) {
  using detail::json_escape;
  std::string j = "{\n";
  j += "  \"experiment\": \"" + json_escape(b.experiment) + "\",\n";
  j += "  \"code_version\": \"" + std::string(kCodeVersion) + "\",\n";
  j += "  \"config\": {\n";
  for (size_t si = 0; si < b.config_echo.sections.size(); ++si) {
    const auto& s = b.config_echo.sections[si];
    j += "    \"" + json_escape(s.name) + "\": {\n";
    for (size_t ei = 0; ei < s.entries.size(); ++ei)
      j += "      \"" + json_escape(s.entries[ei].first) + "\": \"" +
           json_escape(s.entries[ei].second) + "\"" +
           (ei + 1 < s.entries.size() ? ",\n" : "\n");
    j += si + 1 < b.config_echo.sections.size() ? "    },\n" : "    }\n";
  }
  j += "  },\n";
  j += "  \"grid_hashes\": {\n";
  for (size_t i = 0; i < b.grid_hashes.size(); ++i)
    j += "    \"" + json_escape(b.grid_hashes[i].first) + "\": \"" +
         detail::hex16(b.grid_hashes[i].second) + "\"" +
         (i + 1 < b.grid_hashes.size() ? ",\n" : "\n");
  j += "  },\n";
  j += "  \"summary\": {\n";
  for (size_t i = 0; i < b.summary.size(); ++i)
    j += "    \"" + json_escape(b.summary[i].first) + "\": " +
         format_g17(b.summary[i].second) +
         (i + 1 < b.summary.size() ? ",\n" : "\n");
  j += "  },\n";
  j += "  \"tables\": {\n";
  for (size_t i = 0; i < b.tables.size(); ++i) {
    const auto& t = b.tables[i];
    j += "    \"" + json_escape(t.name) + "\": {\"file\": \"" +
         json_escape(t.name) + ".csv\", \"rows\": " + std::to_string(t.rows.size()) +
         ", \"columns\": [";
    for (size_t c = 0; c < t.columns.size(); ++c)
      j += (c ? ", " : "") + ("\"" + json_escape(t.columns[c]) + "\"");
    j += "]}";
    j += i + 1 < b.tables.size() ? ",\n" : "\n";
  }
  j += "  }\n}\n";
  return j;
}

// name -> content pairs for the single writer step at the end of a run
inline std::vector<std::pair<std::string, std::string>> bundle_files(const ResultBundle& b) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& t : b.tables)
    files.emplace_back(t.name + ".csv", render_csv(t));
  files.emplace_back("summary.json", render_summary_json(b));
  return files;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw error("write failed for " + path.string());
}

inline void write_bundle(const std::string& dir, const ResultBundle& b) {
  std::filesystem::create_directories(dir);
  for (const auto& f : bundle_files(b))
    write_text_file(std::filesystem::path(dir) / f.first, f.second);
}

}  // namespace sk
