#pragma once

#include "hdcov/sample.hpp"

#include <string>

namespace hdcov {

/// Reads a numeric matrix, one observation per line. Fields are separated
/// by tabs if the first line contains one, else by commas. A first line
/// with any non-numeric field is taken as a header and skipped. Throws
/// ParseError with line and column on bad cells.
SampleMatrix load_sample_matrix(const std::string& path);

}  // namespace hdcov
