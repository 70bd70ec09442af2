#pragma once

#include <stdexcept>

namespace icm {

// Base class for all engine errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape/extent mismatches and invalid dimension arguments.
struct DimensionError : Error {
  using Error::Error;
};

// Malformed tensor/image files: bad magic, version, dtype, truncation.
struct FormatError : Error {
  using Error::Error;
};

// Filesystem failures: unreadable or unwritable paths.
struct IoError : Error {
  using Error::Error;
};

// Violations of an operation's contract (invalid step, out-of-grid flow, ...).
struct ContractError : Error {
  using Error::Error;
};

}  // namespace icm
