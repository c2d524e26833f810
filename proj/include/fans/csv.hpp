#pragma once

// Comma-separated datasets: header row, '.' decimals, optional 0/1 label
// column. Quoting is limited to a double-quoted cell with no embedded commas.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fans/dataset.hpp"
#include "fans/error.hpp"

namespace fans::csv {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline std::optional<double> parse_number(std::string_view cell) {
  if (cell.starts_with('+')) cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return value;
}

}  // namespace detail

/// Parses a dataset. Rows are numbered from 1 after the header in messages.
inline Dataset read_csv(std::istream& in, const std::optional<std::string>& label_column) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "missing header row");
  std::vector<std::string> header;
  for (auto cell : detail::split(line)) header.emplace_back(cell);
  std::optional<std::size_t> label_at;
  Dataset data;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (label_column && header[c] == *label_column) {
      label_at = c;
    } else {
      data.feature_names.emplace_back(header[c]);
    }
  }
  if (label_column && !label_at) throw Error(ErrorCode::kParse, "label column '" + *label_column + "' not in header");

  std::vector<double> values;
  Labels labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kParse, "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                         " cells, header has " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto number = detail::parse_number(cells[c]);
      if (!number || !std::isfinite(*number)) {
        throw Error(ErrorCode::kParse, "row " + std::to_string(row) + ", column " + std::string(header[c]) +
                                           ": not a finite number '" + std::string(cells[c]) + "'");
      }
      if (label_at && c == *label_at) {
        if (*number != 0.0 && *number != 1.0) {
          throw Error(ErrorCode::kLabelDomain, "row " + std::to_string(row) + ": label '" + std::string(cells[c]) +
                                                   "' is not 0 or 1");
        }
        labels.push_back(static_cast<int>(*number));
      } else {
        values.push_back(*number);
      }
    }
  }
  const auto p = static_cast<Eigen::Index>(data.feature_names.size());
  data.features.resize(static_cast<Eigen::Index>(row), p);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(row); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) data.features(i, j) = values[static_cast<std::size_t>(i * p + j)];
  }
  if (label_at) data.labels = std::move(labels);
  return data;
}

inline Dataset load_csv(const std::string& path, const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return read_csv(in, label_column);
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void write_csv(std::ostream& out, const Dataset& data, const std::string& label_column = "label") {
  const auto p = data.cols();
  for (std::size_t j = 0; j < p; ++j) {
    if (j) out << ',';
    out << (j < data.feature_names.size() ? data.feature_names[j] : "x" + std::to_string(j + 1));
  }
  if (data.labels) out << (p ? "," : "") << label_column;
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (j) out << ',';
      out << format_double(data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    if (data.labels) out << (p ? "," : "") << (*data.labels)[i];
    out << '\n';
  }
}

inline void save_csv(const std::string& path, const Dataset& data, const std::string& label_column = "label") {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  write_csv(out, data, label_column);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

}  // namespace fans::csv
