#pragma once

#include <string>
#include <vector>

#include "fna/dataset.hpp"

namespace fna {

// Reads a UTF-8, comma-separated, header-first file. Columns named "y" and
// "a" are required and must be 0/1; the covariates are all remaining columns
// unless an explicit list is given. Throws ParseError (with 1-based file
// line / column) for malformed cells and SchemaError for structural issues.
Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& covariates = {});

// Writes y, a and the covariates with full round-trip precision;
// load_csv(write_csv(d)) reproduces d exactly.
void write_csv(const Dataset& d, const std::string& path);

}  // namespace fna
