#pragma once

// Rectangular result tables and their CSV / JSON serialization.
//
// CSV dialect (shared with the susceptibility ingest format): UTF-8, comma
// separated, '.' decimal point, one record per line, lines starting with '#'
// are comments. Metadata is written as leading "# key: value" comments.
// Numbers use the shortest representation that round-trips exactly.

#include <dimerq/error.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace dimerq {

struct SweepTable {
  std::vector<std::string> columns;             // numeric columns
  std::vector<std::vector<double>> values;      // row-major, one entry per column
  std::vector<std::string> text_columns;        // label columns, emitted after numeric ones
  std::vector<std::vector<std::string>> labels; // row-major
  std::map<std::string, std::string> metadata;

  std::size_t row_count() const { return values.size(); }

  void add_row(std::vector<double> row, std::vector<std::string> row_labels = {}) {
    if (row.size() != columns.size() || row_labels.size() != text_columns.size())
      throw std::invalid_argument("row width does not match table columns");
    values.push_back(std::move(row));
    labels.push_back(std::move(row_labels));
  }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name)
        return i;
    throw std::out_of_range("no numeric column '" + std::string(name) + "'");
  }

  std::vector<double> column(std::string_view name) const {
    const std::size_t k = index_of(name);
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& row : values)
      out.push_back(row[k]);
    return out;
  }

  std::vector<std::string> text_column(std::string_view name) const {
    for (std::size_t k = 0; k < text_columns.size(); ++k) {
      if (text_columns[k] != name)
        continue;
      std::vector<std::string> out;
      for (const auto& row : labels)
        out.push_back(row[k]);
      return out;
    }
    throw std::out_of_range("no text column '" + std::string(name) + "'");
  }
};

enum class TableFormat { csv, json };

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

inline bool parse_number(std::string_view text, double& out) {
  if (text == "nan") { out = std::nan(""); return true; }
  if (text == "inf") { out = INFINITY; return true; }
  if (text == "-inf") { out = -INFINITY; return true; }
  if (!text.empty() && text.front() == '+')
    text.remove_prefix(1);
  const auto result = std::from_chars(text.data(), text.data() + text.size(), out);
  return result.ec == std::errc() && result.ptr == text.data() + text.size();
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return fields;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
}

} // namespace detail

inline void write_csv(const SweepTable& table, std::ostream& os) {
  for (const auto& [key, value] : table.metadata)
    os << "# " << key << ": " << value << '\n';

  bool first = true;
  for (const auto& name : table.columns) {
    os << (first ? "" : ",") << name;
    first = false;
  }
  for (const auto& name : table.text_columns) {
    os << (first ? "" : ",") << name;
    first = false;
  }
  os << '\n';

  for (std::size_t r = 0; r < table.row_count(); ++r) {
    first = true;
    for (double v : table.values[r]) {
      os << (first ? "" : ",") << detail::format_number(v);
      first = false;
    }
    for (const auto& label : table.labels[r]) {
      os << (first ? "" : ",") << label;
      first = false;
    }
    os << '\n';
  }
}

inline void write_json(const SweepTable& table, std::ostream& os) {
  nlohmann::ordered_json doc;
  doc["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.metadata)
    doc["metadata"][key] = value;

  nlohmann::ordered_json order = nlohmann::ordered_json::array();
  nlohmann::ordered_json columns = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < table.columns.size(); ++k) {
    nlohmann::ordered_json data = nlohmann::ordered_json::array();
    for (const auto& row : table.values) {
      if (std::isfinite(row[k]))
        data.push_back(row[k]);
      else
        data.push_back(nullptr);
    }
    order.push_back(table.columns[k]);
    columns[table.columns[k]] = std::move(data);
  }
  for (std::size_t k = 0; k < table.text_columns.size(); ++k) {
    nlohmann::ordered_json data = nlohmann::ordered_json::array();
    for (const auto& row : table.labels)
      data.push_back(row[k]);
    order.push_back(table.text_columns[k]);
    columns[table.text_columns[k]] = std::move(data);
  }
  doc["column_order"] = std::move(order);
  doc["rows"] = table.row_count();
  doc["columns"] = std::move(columns);
  os << doc.dump(2) << '\n';
}

inline void write_table(const SweepTable& table, TableFormat format, std::ostream& os) {
  if (format == TableFormat::csv)
    write_csv(table, os);
  else
    write_json(table, os);
}

/// Writes `table` to `path`; I/O failures are reported with the path.
inline void emit(const SweepTable& table, TableFormat format, const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file)
    throw DataError("cannot open '" + path + "' for writing");
  write_table(table, format, file);
  file.flush();
  if (!file)
    throw DataError("failed writing '" + path + "'");
}

/// Reads a table written by write_csv. A column is numeric when every one of
/// its cells parses as a number, otherwise it is a text column.
inline SweepTable read_csv_table(std::istream& is) {
  SweepTable table;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> cells;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty())
      continue;
    if (line.front() == '#') {
      const std::size_t colon = line.find(": ");
      if (header.empty() && line.size() > 2 && colon != std::string::npos)
        table.metadata[line.substr(2, colon - 2)] = line.substr(colon + 2);
      continue;
    }
    auto fields = detail::split_csv_line(line);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size())
      throw DataError("row " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    cells.push_back(std::move(fields));
  }
  if (header.empty())
    throw DataError("table has no header line");

  std::vector<bool> numeric(header.size(), true);
  for (std::size_t k = 0; k < header.size(); ++k) {
    double v;
    for (const auto& row : cells)
      if (!detail::parse_number(row[k], v)) {
        numeric[k] = false;
        break;
      }
  }
  for (std::size_t k = 0; k < header.size(); ++k)
    (numeric[k] ? table.columns : table.text_columns).push_back(header[k]);

  for (const auto& row : cells) {
    std::vector<double> nums;
    std::vector<std::string> texts;
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (numeric[k]) {
        double v = 0.0;
        detail::parse_number(row[k], v);
        nums.push_back(v);
      } else {
        texts.push_back(row[k]);
      }
    }
    table.add_row(std::move(nums), std::move(texts));
  }
  return table;
}

inline SweepTable load_table(const std::string& path) {
  std::ifstream file(path);
  if (!file)
    throw DataError("cannot open '" + path + "'");
  return read_csv_table(file);
}

} // namespace dimerq
