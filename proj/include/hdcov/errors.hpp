#pragma once

#include <stdexcept>
#include <string>

namespace hdcov {

/// Sample size below what an estimator's distinct-index sums require.
class SampleSizeError : public std::invalid_argument {
public:
    explicit SampleSizeError(const std::string& what)
        : std::invalid_argument("sample too small for estimator order: " + what) {}
};

/// Incompatible dimensions between samples, partitions, or matrices.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A null-scale estimate came out non-positive, so no standardized statistic exists.
class DegenerateScaleError : public std::runtime_error {
public:
    explicit DegenerateScaleError(const std::string& what)
        : std::runtime_error("degenerate null-scale estimate: " + what) {}
};

/// Malformed input file; the message carries file position.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hdcov
