#include "eeg/problem_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace eeg {
namespace {

double read_number(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) throw ParseError(std::string("problem file: missing ") + what);
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(std::string("problem file: bad number '") + token + "' in " + what);
  }
  return value;
}

std::istringstream next_line(std::istream& in, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
  }
  throw ParseError(std::string("problem file: unexpected end of input reading ") + what);
}

void expect_end(std::istringstream& line, const char* what) {
  std::string rest;
  if (line >> rest) throw ParseError(std::string("problem file: trailing data in ") + what);
}

}  // namespace

ProblemData read_problem(std::istream& in) {
  ProblemData data;
  auto header = next_line(in, "header");
  long long p = 0;
  long long n = 0;
  if (!(header >> p >> n) || p <= 0 || n <= 0) {
    throw ParseError("problem file: header must be 'p n' with positive sizes");
  }
  expect_end(header, "header");

  data.A.resize(p, n);
  for (long long i = 0; i < p; ++i) {
    auto row = next_line(in, "matrix row");
    for (long long j = 0; j < n; ++j) data.A(i, j) = read_number(row, "matrix row");
    expect_end(row, "matrix row");
  }
  auto bline = next_line(in, "b");
  data.b.resize(p);
  for (long long i = 0; i < p; ++i) data.b[i] = read_number(bline, "b");
  expect_end(bline, "b");

  auto lline = next_line(in, "lambda");
  data.lambda = read_number(lline, "lambda");
  expect_end(lline, "lambda");
  std::string rest;
  if (in >> rest) throw ParseError("problem file: unexpected data after lambda");
  return data;
}

ProblemData read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  return read_problem(in);
}

void write_problem(std::ostream& out, const Matrix& A, const Vector& b, double lambda) {
  if (A.rows() != b.size()) throw DimensionError("write_problem: b must have A.rows() entries");
  char buf[32];
  auto put = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.write(buf, ptr - buf);
  };
  out << A.rows() << ' ' << A.cols() << '\n';
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      if (j) out << ' ';
      put(A(i, j));
    }
    out << '\n';
  }
  for (Index i = 0; i < b.size(); ++i) {
    if (i) out << ' ';
    put(b[i]);
  }
  out << '\n';
  put(lambda);
  out << '\n';
}

void write_problem_file(const std::string& path, const Matrix& A, const Vector& b, double lambda) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write problem file: " + path);
  write_problem(out, A, b, lambda);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::unique_ptr<L1LeastSquares> make_problem(ProblemData data) {
  return std::make_unique<L1LeastSquares>(std::move(data.A), std::move(data.b), data.lambda);
}

}  // namespace eeg
