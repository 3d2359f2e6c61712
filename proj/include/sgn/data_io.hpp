#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace sgn {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Labeled sparse dataset. Labels are normalized to {-1,+1}; feature column
// indices are 0-based internally (1-based in the text format).
struct Dataset {
  int n = 0;
  int d = 0;
  Eigen::VectorXd labels;
  Eigen::SparseMatrix<double, Eigen::RowMajor> features;
};

// Parses the text format "label idx:value idx:value ...", one sample per
// line. Accepts {0,1} and {-1,+1} label conventions (0 maps to -1), skips
// blank lines, strips '#' comments. The feature dimension is the largest
// index seen unless dimension_override > 0 pins it (train/test shards of one
// corpus must agree on d). Malformed input throws ParseError with the
// 1-based line number.
Dataset parse_libsvm(std::istream& in, int dimension_override = 0);

// Reads a file, transparently inflating gzip input (detected by the
// 0x1f 0x8b magic bytes).
Dataset parse_libsvm_file(const std::string& path, int dimension_override = 0);

// Canonical form: label as +-1 integer, 1-based ascending indices, values
// with 17 significant digits so a parse of the output is bit-exact.
void write_libsvm(const Dataset& ds, std::ostream& out);

// Synthetic binary logistic dataset: Gaussian features whose population
// second-moment matrix has condition number `condition` (trace normalized to
// d), labels from a planted parameter with 10% label noise.
Dataset synth_logistic(int n, int d, double condition, std::uint64_t seed);

}  // namespace sgn
