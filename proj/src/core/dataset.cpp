#include "annimpute/core/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "annimpute/errors.hpp"

namespace annimpute {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string where(const std::filesystem::path& path, std::size_t row, std::size_t col) {
  return path.filename().string() + ":" + std::to_string(row + 1) + ":" + std::to_string(col + 1);
}

int parse_label(std::string_view field, const LabelSchema& schema, const std::string& location) {
  if (schema.scale == 1) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw DataError(location + ": non-integer cell '" + std::string(field) + "'");
    }
    return value;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError(location + ": non-numeric cell '" + std::string(field) + "'");
  }
  const double scaled = value * schema.scale;
  if (std::abs(scaled - std::round(scaled)) > 1e-9) {
    throw DataError(location + ": cell '" + std::string(field) + "' is not a multiple of 1/" +
                    std::to_string(schema.scale));
  }
  return static_cast<int>(std::lround(scaled));
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

std::vector<std::string> read_texts(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  for (auto& line : lines) {
    auto tab = line.find('\t');
    if (tab != std::string::npos) line.erase(0, tab + 1);
  }
  return lines;
}

void write_texts(const std::filesystem::path& path, const std::vector<std::string>& texts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].find('\n') != std::string::npos) {
      throw DataError("text " + std::to_string(i) + " contains a newline");
    }
    // An id prefix keeps embedded tabs from being read as one.
    if (texts[i].find('\t') != std::string::npos) out << i << '\t';
    out << texts[i] << '\n';
  }
}

AnnotationMatrix read_annotations_csv(const std::filesystem::path& path,
                                      const LabelSchema& schema) {
  schema.validate();
  auto lines = read_lines(path);
  std::vector<Cell> cells;
  std::size_t n_cols = 0;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    auto fields = split_commas(lines[r]);
    if (r == 0) {
      n_cols = fields.size();
    } else if (fields.size() != n_cols) {
      throw DataError(path.filename().string() + ":" + std::to_string(r + 1) + ": expected " +
                      std::to_string(n_cols) + " columns, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      auto field = trim(fields[c]);
      if (field.empty()) continue;
      const std::string location = where(path, r, c);
      int label = parse_label(field, schema, location);
      if (!schema.contains(label)) {
        throw DataError(location + ": label out of range '" + std::string(field) + "'");
      }
      cells.push_back({r, c, label});
    }
  }
  return AnnotationMatrix(lines.size(), n_cols, schema, std::move(cells));
}

void write_annotations_csv(const std::filesystem::path& path, const AnnotationMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < matrix.n_items(); ++i) {
    auto row = matrix.row(i);
    auto it = row.begin();
    for (std::size_t j = 0; j < matrix.n_annotators(); ++j) {
      if (j > 0) out << ',';
      if (it != row.end() && it->annotator == j) {
        out << matrix.schema().display(it->label);
        ++it;
      }
    }
    out << '\n';
  }
}

void write_annotations_csv(const std::filesystem::path& path, const LabelGrid& complete,
                           const LabelSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < complete.rows(); ++i) {
    for (std::size_t j = 0; j < complete.cols(); ++j) {
      if (j > 0) out << ',';
      out << schema.display(complete(i, j));
    }
    out << '\n';
  }
}

LabelGrid read_complete_csv(const std::filesystem::path& path, const LabelSchema& schema) {
  auto matrix = read_annotations_csv(path, schema);
  if (matrix.size() != matrix.n_items() * matrix.n_annotators()) {
    throw DataError(path.string() + ": expected a complete matrix without missing cells");
  }
  LabelGrid grid(matrix.n_items(), matrix.n_annotators());
  for (const Cell& c : matrix.cells()) grid(c.item, c.annotator) = c.label;
  return grid;
}

void write_real_csv(const std::filesystem::path& path, const RealGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(grid(i, j));
    }
    out << '\n';
  }
}

RealGrid read_real_csv(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    std::vector<double> values;
    auto fields = split_commas(lines[r]);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      auto field = trim(fields[c]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw DataError(where(path, r, c) + ": not a number");
      }
      values.push_back(v);
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw DataError(path.filename().string() + ":" + std::to_string(r + 1) +
                      ": inconsistent column count");
    }
    rows.push_back(std::move(values));
  }
  RealGrid grid(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) grid(r, c) = rows[r][c];
  }
  return grid;
}

Dataset load_dataset(const std::filesystem::path& texts_path,
                     const std::filesystem::path& annotations_path, const LabelSchema& schema) {
  Dataset dataset{read_texts(texts_path), read_annotations_csv(annotations_path, schema)};
  if (dataset.texts.size() != dataset.matrix.n_items()) {
    throw DataError("row-count mismatch: " + std::to_string(dataset.texts.size()) +
                    " texts vs " + std::to_string(dataset.matrix.n_items()) +
                    " annotation rows");
  }
  dataset.matrix.require_nonempty_rows();
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& texts_path,
                  const std::filesystem::path& annotations_path) {
  write_texts(texts_path, dataset.texts);
  write_annotations_csv(annotations_path, dataset.matrix);
}

}  // namespace annimpute
