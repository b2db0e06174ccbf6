#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sensakit {

enum class Role { input, output };

struct Bounds {
  double lower = 0.0;
  double upper = 1.0;

  double width() const noexcept { return upper - lower; }
  bool contains(double x) const noexcept { return x >= lower && x <= upper; }
};

struct Column {
  std::string name;
  Role role = Role::input;
  std::vector<double> values;
  std::optional<Bounds> bounds;
};

/// Column-oriented sample table: d input columns and at most one output.
///
/// Immutable once built; the constructor enforces equal column lengths,
/// a single output and bound containment.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Column> columns, std::string provenance = {});

  std::size_t size() const noexcept { return rows_; }
  std::size_t input_count() const noexcept { return inputs_.size(); }
  bool has_output() const noexcept { return output_.has_value(); }

  /// k is 0-based over the input columns in storage order.
  std::span<const double> input(std::size_t k) const;
  std::span<const double> output() const;
  const Column& input_column(std::size_t k) const;
  const Column& output_column() const;
  const std::vector<Column>& columns() const noexcept { return columns_; }
  const std::string& provenance() const noexcept { return provenance_; }

  std::vector<std::optional<Bounds>> input_bounds() const;

  /// Copy of the inputs with `values` attached as the output column.
  Dataset with_output(std::vector<double> values, std::string name = "y") const;
  /// Copy holding only the input columns.
  Dataset inputs_only() const;

 private:
  std::vector<Column> columns_;
  std::vector<std::size_t> inputs_;
  std::optional<std::size_t> output_;
  std::size_t rows_ = 0;
  std::string provenance_;
};

/// Build an input-only dataset from column vectors named x1..xd.
Dataset make_input_dataset(std::vector<std::vector<double>> columns,
                           const std::vector<std::optional<Bounds>>& bounds = {},
                           std::string provenance = {});

/// Column name -> role. Columns that are not listed are inputs, in file order.
using RoleMap = std::map<std::string, Role>;

Dataset dataset_from_csv(const std::filesystem::path& path, const RoleMap& roles);
Dataset dataset_from_csv(std::istream& in, const RoleMap& roles, const std::string& origin = "<stream>");
/// Header row plus one row per sample, written with round-trip precision.
void dataset_to_csv(const Dataset& data, std::ostream& out);
void dataset_to_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace sensakit
