#pragma once

#include <string>
#include <vector>

namespace ewl {

struct Dataset {
  std::string name;
  std::string source_path;
  std::vector<double> values;
};

// Reads one numeric column from a plain-text or CSV file. Lines starting
// with '#' are comments; a non-numeric first row is treated as a header.
// `column` is zero-based and splits on commas or whitespace. Throws
// std::runtime_error with the offending line number on malformed input or
// nonpositive/nonfinite values.
Dataset read_dataset(const std::string& path, int column = 0);

}  // namespace ewl
