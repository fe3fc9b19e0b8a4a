#pragma once

#include <string>
#include <variant>
#include <vector>

namespace rlab {

enum class ColumnType { integer, real, text };

struct Column {
  std::string name;
  ColumnType type = ColumnType::real;
};

using Cell = std::variant<double, std::string>;

struct ResultTable {
  std::string schema;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  bool empty() const { return rows.empty(); }
  // Errors: InvalidArgument for an unknown column.
  std::size_t column(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
  std::vector<std::string> texts(const std::string& name) const;
};

// Registered schemas: expectation, bilinear, incidence, cgo, wavepacket, induction.
// Errors: InvalidArgument for an unknown name.
ResultTable make_table(const std::string& schema);
// Coefficient index for n-dimensional packets: cap, omega_1 ... omega_n.
ResultTable packet_index_table(int n);

// Row arity, cell types, integral integer cells, finite reals, and the column
// list of a registered schema. Errors: InvalidArgument naming row and column.
void validate(const ResultTable& table);

// Header line then one line per row; numbers as %.17g, text quoted when needed.
std::string to_csv(const ResultTable& table);
// Errors: Unwritable.
void write_csv(const std::string& path, const ResultTable& table);
// Parses CSV text against the columns of `schema` (header must match).
// Errors: InvalidArgument.
ResultTable parse_csv(const std::string& text, const ResultTable& schema);

}  // namespace rlab
