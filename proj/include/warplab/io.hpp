#pragma once

// Small text helpers: JSON number handling and CSV writing/reading.

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "warplab/errors.hpp"
#include "warplab/numeric.hpp"

namespace warplab {

using Json = nlohmann::json;

/// Rewrites every bare number literal of a JSON text as a string, so that
/// values outside double range (schedule entries, "1e5000" caps) survive
/// parsing and can be read with parse_wide/parse_bigint.
inline std::string quote_json_numbers(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 16);
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_string) {
      out.push_back(ch);
      if (ch == '\\' && i + 1 < text.size()) {
        out.push_back(text[++i]);
      } else if (ch == '"') {
        in_string = false;
      }
      continue;
    }
    if (ch == '"') {
      in_string = true;
      out.push_back(ch);
      continue;
    }
    if (ch == '-' || std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i + 1;
      while (j < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[j])) ||
              text[j] == '.' || text[j] == 'e' || text[j] == 'E' ||
              text[j] == '+' || text[j] == '-'))
        ++j;
      out.push_back('"');
      out.append(text.substr(i, j - i));
      out.push_back('"');
      i = j - 1;
      continue;
    }
    out.push_back(ch);
  }
  return out;
}

/// Parses JSON with every number kept as its literal text.
inline Json parse_json_literal(std::string_view text) {
  try {
    return Json::parse(quote_json_numbers(text));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

/// Literal JSON value as text (accepts both quoted and bare numbers).
inline std::string literal_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ParseError("expected a number, got " + v.dump());
}

inline double literal_double(const Json& v) {
  const std::string s = literal_text(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("not a number: '" + s + "'");
  return d;
}

inline long long literal_int(const Json& v) {
  const std::string s = literal_text(v);
  char* end = nullptr;
  const long long n = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("not an integer: '" + s + "'");
  return n;
}

// CSV -----------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> comments;  // lines that started with '#', sans '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.substr(1));
      continue;
    }
    auto cells = split_csv_line(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != t.header.size())
        throw ParseError("CSV row has " + std::to_string(cells.size()) +
                         " cells, header has " +
                         std::to_string(t.header.size()));
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw ParseError("CSV has no header");
  return t;
}

inline double csv_double(const std::string& cell) {
  char* end = nullptr;
  const double d = std::strtod(cell.c_str(), &end);
  if (cell.empty() || *end != '\0') throw ParseError("bad CSV number: " + cell);
  return d;
}

}  // namespace warplab
