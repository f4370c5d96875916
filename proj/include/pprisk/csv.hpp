#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pprisk/error.hpp"

namespace pprisk::csv {

/// Split one CSV line, honoring double-quoted fields with "" escapes.
inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Column layout shared by a table and its rows.
struct Schema {
  std::string path;
  std::vector<std::string> header;
  std::unordered_map<std::string, std::size_t> columns;

  std::optional<std::size_t> index(std::string_view name) const {
    auto it = columns.find(std::string(name));
    if (it == columns.end()) return std::nullopt;
    return it->second;
  }
};

/// One data row; field access is by header name and reports the file line
/// on conversion failures.
class Row {
 public:
  Row(std::shared_ptr<const Schema> schema, std::vector<std::string> fields, std::size_t line)
      : schema_(std::move(schema)), fields_(std::move(fields)), line_(line) {}

  std::size_t line() const { return line_; }
  bool has(std::string_view column) const { return schema_->index(column).has_value(); }
  std::string_view str(std::string_view column) const {
    auto idx = schema_->index(column);
    if (!idx) fail(column, "no such column");
    return fields_[*idx];
  }
  bool empty(std::string_view column) const { return !has(column) || trim(str(column)).empty(); }
  std::optional<double> opt_num(std::string_view column) const {
    if (empty(column)) return std::nullopt;
    return num(column);
  }

  double num(std::string_view column) const {
    std::string_view s = trim(str(column));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      fail(column, "not a number: '" + std::string(s) + "'");
    if (!std::isfinite(v)) fail(column, "non-finite value");
    return v;
  }

  int integer(std::string_view column) const {
    std::string_view s = trim(str(column));
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      fail(column, "not an integer: '" + std::string(s) + "'");
    return v;
  }

  [[noreturn]] void fail(std::string_view column, std::string_view why) const {
    throw Error(ErrorCode::Parse, "csv",
                schema_->path + ":" + std::to_string(line_) + ": column '" +
                    std::string(column) + "': " + std::string(why));
  }

 private:
  std::shared_ptr<const Schema> schema_;
  std::vector<std::string> fields_;
  std::size_t line_;
};

class Table {
 public:
  static Table parse(std::istream& in, const std::string& path) {
    auto schema = std::make_shared<Schema>();
    schema->path = path;
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view view = trim(line);
      if (view.empty()) continue;
      auto fields = split_line(view);
      for (auto& f : fields) f = std::string(trim(f));
      if (!have_header) {
        for (std::size_t i = 0; i < fields.size(); ++i) schema->columns.emplace(fields[i], i);
        schema->header = std::move(fields);
        have_header = true;
        continue;
      }
      if (fields.size() != schema->header.size())
        throw Error(ErrorCode::Parse, "csv",
                    path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(schema->header.size()) + " fields, found " +
                        std::to_string(fields.size()));
      t.rows_.emplace_back(schema, std::move(fields), lineno);
    }
    if (!have_header) throw Error(ErrorCode::Parse, "csv", path + ": empty file, no header");
    t.schema_ = std::move(schema);
    return t;
  }

  static Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "csv", "cannot open " + path);
    return parse(in, path);
  }

  const std::string& path() const { return schema_->path; }
  const std::vector<std::string>& header() const { return schema_->header; }
  const std::vector<Row>& rows() const { return rows_; }
  bool has_column(std::string_view name) const { return schema_->index(name).has_value(); }

  /// Throws a parse error naming the first missing required column.
  void require(std::initializer_list<std::string_view> names) const {
    for (auto n : names)
      if (!has_column(n))
        throw Error(ErrorCode::Parse, "csv",
                    path() + ":1: missing required column '" + std::string(n) + "'");
  }

 private:
  std::shared_ptr<const Schema> schema_;
  std::vector<Row> rows_;
};

/// Quote a field only when needed.
inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

/// Accumulates rows in memory; flushed to disk in one write.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header) : columns_(header.size()) { add(header); }

  void add(const std::vector<std::string>& fields) {
    if (fields.size() != columns_)
      throw Error(ErrorCode::Shape, "csv", "row width does not match header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) buf_ << ',';
      buf_ << escape(fields[i]);
    }
    buf_ << '\n';
  }

  std::string str() const { return buf_.str(); }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "csv", "cannot write " + path);
    out << buf_.str();
  }

 private:
  std::size_t columns_;
  std::ostringstream buf_;
};

}  // namespace pprisk::csv
