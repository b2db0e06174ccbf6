#include "sensakit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sensakit/error.hpp"

namespace sensakit {

Dataset::Dataset(std::vector<Column> columns, std::string provenance)
    : columns_(std::move(columns)), provenance_(std::move(provenance)) {
  if (columns_.empty()) throw Error(ErrorCode::invalid_argument, "dataset needs at least one column");
  rows_ = columns_.front().values.size();
  if (rows_ == 0) throw Error(ErrorCode::invalid_argument, "dataset needs at least one row");
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const Column& col = columns_[c];
    if (col.values.size() != rows_) {
      throw Error(ErrorCode::length_mismatch, "column '" + col.name + "' has " +
                                                  std::to_string(col.values.size()) + " values, expected " +
                                                  std::to_string(rows_));
    }
    if (col.role == Role::output) {
      if (output_) throw Error(ErrorCode::duplicate_output, "more than one output column");
      output_ = c;
    } else {
      inputs_.push_back(c);
    }
    if (col.bounds) {
      if (!(col.bounds->lower < col.bounds->upper)) {
        throw Error(ErrorCode::invalid_argument, "column '" + col.name + "' has empty bounds");
      }
      for (double v : col.values) {
        if (!col.bounds->contains(v)) {
          throw Error(ErrorCode::domain_error, "value outside bounds in column '" + col.name + "'");
        }
      }
    }
  }
}

std::span<const double> Dataset::input(std::size_t k) const { return input_column(k).values; }

std::span<const double> Dataset::output() const { return output_column().values; }

const Column& Dataset::input_column(std::size_t k) const {
  if (k >= inputs_.size()) {
    throw Error(ErrorCode::dimension_mismatch, "input index " + std::to_string(k) + " out of range");
  }
  return columns_[inputs_[k]];
}

const Column& Dataset::output_column() const {
  if (!output_) throw Error(ErrorCode::invalid_argument, "dataset has no output column");
  return columns_[*output_];
}

std::vector<std::optional<Bounds>> Dataset::input_bounds() const {
  std::vector<std::optional<Bounds>> out;
  for (std::size_t c : inputs_) out.push_back(columns_[c].bounds);
  return out;
}

Dataset Dataset::with_output(std::vector<double> values, std::string name) const {
  std::vector<Column> cols;
  for (std::size_t c : inputs_) cols.push_back(columns_[c]);
  cols.push_back(Column{std::move(name), Role::output, std::move(values), std::nullopt});
  return Dataset(std::move(cols), provenance_);
}

Dataset Dataset::inputs_only() const {
  std::vector<Column> cols;
  for (std::size_t c : inputs_) cols.push_back(columns_[c]);
  return Dataset(std::move(cols), provenance_);
}

Dataset make_input_dataset(std::vector<std::vector<double>> columns,
                           const std::vector<std::optional<Bounds>>& bounds, std::string provenance) {
  std::vector<Column> cols;
  cols.reserve(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    Column c;
    c.name = "x" + std::to_string(k + 1);
    c.role = Role::input;
    c.values = std::move(columns[k]);
    if (k < bounds.size()) c.bounds = bounds[k];
    cols.push_back(std::move(c));
  }
  return Dataset(std::move(cols), std::move(provenance));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t line_no, const std::string& origin) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorCode::non_numeric,
                origin + ":" + std::to_string(line_no) + ": '" + std::string(cell) + "' is not a finite number");
  }
  return value;
}

}  // namespace

Dataset dataset_from_csv(std::istream& in, const RoleMap& roles, const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    for (auto name : split_commas(t)) header.emplace_back(name);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::parse_error, origin + ": no header row");

  std::size_t outputs = 0;
  for (const auto& [name, role] : roles) {
    if (role == Role::output) ++outputs;
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw Error(ErrorCode::invalid_argument, origin + ": role map names unknown column '" + name + "'");
    }
  }
  if (outputs > 1) throw Error(ErrorCode::duplicate_output, origin + ": more than one output column requested");

  std::vector<std::vector<double>> values(header.size());
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split_commas(t);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ragged_rows, origin + ":" + std::to_string(line_no) + ": expected " +
                                              std::to_string(header.size()) + " fields, found " +
                                              std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) values[c].push_back(parse_cell(cells[c], line_no, origin));
  }

  std::vector<Column> cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    Column col;
    col.name = header[c];
    const auto it = roles.find(header[c]);
    col.role = it == roles.end() ? Role::input : it->second;
    col.values = std::move(values[c]);
    cols.push_back(std::move(col));
  }
  return Dataset(std::move(cols), "csv:" + origin);
}

Dataset dataset_from_csv(const std::filesystem::path& path, const RoleMap& roles) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open '" + path.string() + "'");
  return dataset_from_csv(in, roles, path.string());
}

void dataset_to_csv(const Dataset& data, std::ostream& out) {
  const auto& cols = data.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c].name;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof buf, cols[c].values[i]);
      if (c) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

void dataset_to_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  dataset_to_csv(data, out);
}

}  // namespace sensakit
