#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ncball {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dimensions of a g'×g letter grid (rows = g', cols = g).
struct Grid {
  int rows = 1;
  int cols = 1;

  int size() const { return rows * cols; }
  bool operator==(const Grid&) const = default;
};

/// Coefficient shape d'×d.
struct Shape {
  int rows = 1;
  int cols = 1;

  bool operator==(const Shape&) const = default;
};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible grids, shapes or levels.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Text that does not follow the polynomial grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

std::string to_string(const Grid& g);
std::string to_string(const Shape& s);

}  // namespace ncball
