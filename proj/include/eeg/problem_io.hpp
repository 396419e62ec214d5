#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "eeg/core.hpp"

namespace eeg {

// Plain-text problem files:
//
//   p n
//   <p rows of n whitespace-separated decimals>   (A)
//   <p decimals on one line>                      (b)
//   <lambda>
//
// Values are written with 17 significant digits so a write/read cycle is
// bit-exact.

struct ProblemData {
  Matrix A;
  Vector b;
  double lambda = 0.0;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ProblemData read_problem(std::istream& in);
ProblemData read_problem_file(const std::string& path);

void write_problem(std::ostream& out, const Matrix& A, const Vector& b, double lambda);
void write_problem_file(const std::string& path, const Matrix& A, const Vector& b, double lambda);

std::unique_ptr<L1LeastSquares> make_problem(ProblemData data);

}  // namespace eeg
