#include "ewl/data_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ewl {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  const bool csv = line.find(',') != std::string::npos;
  if (csv) {
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
      const size_t a = field.find_first_not_of(" \t\r");
      const size_t b = field.find_last_not_of(" \t\r");
      out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
  } else {
    std::istringstream ss(line);
    while (ss >> field) out.push_back(field);
  }
  return out;
}

bool parse_number(const std::string& s, double* v) {
  try {
    size_t pos = 0;
    *v = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

Dataset read_dataset(const std::string& path, int column) {
  if (column < 0) throw std::runtime_error("read_dataset: column must be >= 0");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_dataset: cannot open " + path);

  Dataset ds;
  ds.source_path = path;
  const size_t slash = path.find_last_of('/');
  ds.name = (slash == std::string::npos) ? path : path.substr(slash + 1);

  std::string line;
  int lineno = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::vector<std::string> fields = split_fields(line);
    if (fields.empty()) continue;
    if ((size_t)column >= fields.size()) {
      throw std::runtime_error("read_dataset: line " + std::to_string(lineno) +
                               ": no column " + std::to_string(column));
    }
    double v;
    if (!parse_number(fields[column], &v)) {
      // a single non-numeric first row is a header
      if (!saw_data) continue;
      throw std::runtime_error("read_dataset: line " + std::to_string(lineno) +
                               ": not a number: '" + fields[column] + "'");
    }
    if (!(v > 0) || !std::isfinite(v)) {
      throw std::runtime_error("read_dataset: line " + std::to_string(lineno) +
                               ": values must be positive and finite");
    }
    ds.values.push_back(v);
    saw_data = true;
  }
  if (ds.values.empty()) {
    throw std::runtime_error("read_dataset: no data in " + path);
  }
  return ds;
}

}  // namespace ewl
