#pragma once

#include <stdexcept>
#include <string>

namespace fna {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested correlation (or interval) lies outside the range compatible
// with the given marginals.
struct InfeasibleRho : Error {
  using Error::Error;
};

// A marginal mean is 0 or 1, so the potential-outcome correlation is
// undefined (zero variance).
struct DegenerateMarginal : Error {
  using Error::Error;
};

// The operation has no meaning for these inputs (e.g. an informativeness
// threshold when the lower bound is already positive).
struct NotApplicable : Error {
  using Error::Error;
};

struct EmptyFeasibleSet : Error {
  using Error::Error;
};

// Maximum-likelihood logistic fit diverged (perfect separation).
struct SeparationDetected : Error {
  using Error::Error;
};

// A cross-fitting training complement lacks a treatment arm or outcome
// label needed to fit a nuisance model.
struct FoldDegenerate : Error {
  using Error::Error;
};

// Nuisance predictions are not aligned with the dataset they are used on.
struct MisalignedFit : Error {
  using Error::Error;
};

struct InvalidDataset : Error {
  using Error::Error;
};

// CSV cell could not be parsed; carries the 1-based file line and column.
struct ParseError : Error {
  ParseError(const std::string& msg, int line, int column)
      : Error(msg), line(line), column(column) {}
  int line;
  int column;
};

// CSV structure is wrong: missing required columns, non-binary y/a, ...
struct SchemaError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace fna
