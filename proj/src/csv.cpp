#include "fna/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fna/errors.hpp"

namespace fna {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // Trim surrounding spaces and a trailing CR from Windows line endings.
    const auto begin = cell.find_first_not_of(" \t\r");
    const auto end = cell.find_last_not_of(" \t\r");
    cells.push_back(begin == std::string::npos
                        ? std::string()
                        : cell.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, int line, int column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    throw ParseError("cannot parse '" + cell + "' as a number at line " +
                         std::to_string(line) + ", column " +
                         std::to_string(column),
                     line, column);
  }
  return value;
}

int parse_binary(const std::string& cell, const std::string& name, int line,
                 int column) {
  const double v = parse_double(cell, line, column);
  if (v == 0.0) return 0;
  if (v == 1.0) return 1;
  throw SchemaError("column '" + name + "' must be 0/1 but has value '" +
                    cell + "' at row " + std::to_string(line));
}

}  // namespace

Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& covariates) {
  std::ifstream in(path);
  if (!in) {
    throw SchemaError("cannot open input file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError("empty file: " + path);
  }
  const std::vector<std::string> header = split_line(line);

  int y_col = -1, a_col = -1;
  std::vector<int> x_cols;
  std::vector<std::string> x_names;
  for (int j = 0; j < static_cast<int>(header.size()); ++j) {
    if (header[j] == "y") {
      y_col = j;
    } else if (header[j] == "a") {
      a_col = j;
    } else if (covariates.empty()) {
      x_cols.push_back(j);
      x_names.push_back(header[j]);
    }
  }
  if (y_col < 0) throw SchemaError("missing required column 'y'");
  if (a_col < 0) throw SchemaError("missing required column 'a'");
  if (!covariates.empty()) {
    for (const std::string& name : covariates) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) {
        throw SchemaError("requested covariate column '" + name +
                          "' not found");
      }
      x_cols.push_back(static_cast<int>(it - header.begin()));
      x_names.push_back(name);
    }
  }
  if (x_cols.empty()) {
    throw SchemaError("no covariate columns found");
  }

  std::vector<double> ys, as;
  std::vector<std::vector<double>> xs;
  int file_line = 1;
  while (std::getline(in, line)) {
    ++file_line;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw SchemaError("row at line " + std::to_string(file_line) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));
    }
    ys.push_back(parse_binary(cells[y_col], "y", file_line, y_col + 1));
    as.push_back(parse_binary(cells[a_col], "a", file_line, a_col + 1));
    std::vector<double> row(x_cols.size());
    for (std::size_t k = 0; k < x_cols.size(); ++k) {
      row[k] = parse_double(cells[x_cols[k]], file_line, x_cols[k] + 1);
    }
    xs.push_back(std::move(row));
  }
  if (xs.empty()) {
    throw SchemaError("no data rows in " + path);
  }

  Dataset d;
  const int n = static_cast<int>(xs.size());
  const int p = static_cast<int>(x_cols.size());
  d.x.resize(n, p);
  d.a.resize(n);
  d.y.resize(n);
  d.covariate_names = x_names;
  for (int i = 0; i < n; ++i) {
    d.y(i) = static_cast<int>(ys[i]);
    d.a(i) = static_cast<int>(as[i]);
    for (int j = 0; j < p; ++j) d.x(i, j) = xs[i][j];
  }
  validate(d);
  return d;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw SchemaError("cannot open output file: " + path);
  }
  const std::vector<std::string> names = d.covariate_names.empty()
                                             ? default_covariate_names(d.p())
                                             : d.covariate_names;
  out << "y,a";
  for (const std::string& name : names) out << ',' << name;
  out << '\n';
  char buf[40];
  for (int i = 0; i < d.n(); ++i) {
    out << d.y(i) << ',' << d.a(i);
    for (int j = 0; j < d.p(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", d.x(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace fna
