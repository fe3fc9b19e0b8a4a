#include "rlab/table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "rlab/error.hpp"

namespace rlab {

namespace {

constexpr auto I = ColumnType::integer;
constexpr auto X = ColumnType::real;
constexpr auto T = ColumnType::text;

const std::map<std::string, std::vector<Column>>& schemas() {
  static const std::map<std::string, std::vector<Column>> s = {
      {"expectation",
       {{"M", X}, {"samples", I}, {"mean_qnorm", X}, {"se_qnorm", X}, {"mean_mqnorm", X}, {"se_mqnorm", X}}},
      {"bilinear", {{"n", I}, {"surface", T}, {"p_prime", X}, {"mu", X}, {"nu", X}, {"construction", T}, {"ratio", X}}},
      {"incidence",
       {{"R", X}, {"delta", X}, {"mu2", X}, {"lambda1", X}, {"T1", I}, {"T2", I}, {"lhs", X}, {"rhs", X}}},
      {"cgo", {{"sample", I}, {"tau", X}, {"iterations", I}, {"residual", X}, {"contraction", X}, {"psi_norm", X}}},
      {"wavepacket", {{"distance", X}, {"amplitude", X}}},
      {"induction", {{"R", X}, {"K", X}, {"candidate", T}}},
  };
  return s;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        out.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace

std::size_t ResultTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k].name == name) return k;
  throw Error(ErrorKind::InvalidArgument, "table '" + schema + "' has no column '" + name + "'");
}

std::vector<double> ResultTable::numbers(const std::string& name) const {
  std::size_t c = column(name);
  require(columns[c].type != ColumnType::text, ErrorKind::InvalidArgument, "column '" + name + "' is text");
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(std::get<double>(r.at(c)));
  return out;
}

std::vector<std::string> ResultTable::texts(const std::string& name) const {
  std::size_t c = column(name);
  std::vector<std::string> out;
  for (const auto& r : rows)
    out.push_back(std::holds_alternative<std::string>(r.at(c)) ? std::get<std::string>(r[c])
                                                               : format_number(std::get<double>(r[c])));
  return out;
}

ResultTable make_table(const std::string& schema) {
  auto it = schemas().find(schema);
  require(it != schemas().end(), ErrorKind::InvalidArgument, "unknown table schema '" + schema + "'");
  return {schema, it->second, {}};
}

ResultTable packet_index_table(int n) {
  ResultTable t{"packet_index", {{"cap", I}}, {}};
  for (int a = 1; a <= n; ++a) t.columns.push_back({"omega_" + std::to_string(a), X});
  return t;
}

void validate(const ResultTable& table) {
  if (auto it = schemas().find(table.schema); it != schemas().end()) {
    bool same = it->second.size() == table.columns.size();
    for (std::size_t k = 0; same && k < table.columns.size(); ++k)
      same = it->second[k].name == table.columns[k].name && it->second[k].type == table.columns[k].type;
    require(same, ErrorKind::InvalidArgument, "columns differ from schema '" + table.schema + "'");
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    require(row.size() == table.columns.size(), ErrorKind::InvalidArgument,
            "row " + std::to_string(r) + " has " + std::to_string(row.size()) + " cells, expected " +
                std::to_string(table.columns.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Column& col = table.columns[c];
      std::string where = "row " + std::to_string(r) + " column '" + col.name + "'";
      if (col.type == ColumnType::text) {
        require(std::holds_alternative<std::string>(row[c]), ErrorKind::InvalidArgument, where + ": expected text");
        continue;
      }
      require(std::holds_alternative<double>(row[c]), ErrorKind::InvalidArgument, where + ": expected a number");
      double v = std::get<double>(row[c]);
      require(std::isfinite(v), ErrorKind::InvalidArgument, where + ": not finite");
      if (col.type == ColumnType::integer)
        require(v == std::round(v), ErrorKind::InvalidArgument, where + ": expected an integer");
    }
  }
}

std::string to_csv(const ResultTable& table) {
  validate(table);
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + table.columns[c].name;
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      out += std::holds_alternative<double>(row[c]) ? format_number(std::get<double>(row[c]))
                                                    : quote(std::get<std::string>(row[c]));
    }
    out += "\n";
  }
  return out;
}

void write_csv(const std::string& path, const ResultTable& table) {
  std::string text = to_csv(table);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorKind::Unwritable, "cannot open " + path);
  os << text;
  require(static_cast<bool>(os), ErrorKind::Unwritable, "write failed for " + path);
}

ResultTable parse_csv(const std::string& text, const ResultTable& schema) {
  ResultTable t{schema.schema, schema.columns, {}};
  std::stringstream ss(text);
  std::string line;
  require(static_cast<bool>(std::getline(ss, line)), ErrorKind::InvalidArgument, "missing CSV header");
  auto header = split_csv_line(line);
  require(header.size() == t.columns.size(), ErrorKind::InvalidArgument, "CSV header does not match schema");
  for (std::size_t c = 0; c < header.size(); ++c)
    require(header[c] == t.columns[c].name, ErrorKind::InvalidArgument, "unexpected CSV column '" + header[c] + "'");
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    require(cells.size() == t.columns.size(), ErrorKind::InvalidArgument, "CSV row with wrong arity: " + line);
    std::vector<Cell> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (t.columns[c].type == ColumnType::text) {
        row.emplace_back(cells[c]);
        continue;
      }
      char* end = nullptr;
      double v = std::strtod(cells[c].c_str(), &end);
      require(!cells[c].empty() && end == cells[c].c_str() + cells[c].size(), ErrorKind::InvalidArgument,
              "bad number '" + cells[c] + "'");
      row.emplace_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  validate(t);
  return t;
}

}  // namespace rlab
