#pragma once

// Text grammar for NC polynomials and the JSON formats for matrices, tuples,
// pencils, series and polynomial matrices.
//
// Grammar (whitespace between tokens is ignored):
//   poly    := ["+"|"-"] term (("+"|"-") term)*
//   term    := factor+            factors may be separated by "*"
//   factor  := coeff | letter ["^" INT]
//   coeff   := "(" FLOAT ("+"|"-") FLOAT "i" ")" | FLOAT ["i"] | NAME
//   letter  := "x" INT ["_" INT] ["*"]
// Coefficients must come before letters within a term. A "*" right after a
// letter is an adjoint mark unless the next character starts another factor,
// so "x11*x21" is a product while "x11* x21" is x11 adjoint times x21.
// Without "_", a letter with g = 1 is read as x<row> (x11 also means row 1),
// and with g > 1 the two digits are row and column.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncball/balls.hpp"
#include "ncball/ncpoly.hpp"

namespace ncball {

using CoeffTable = std::map<std::string, Mat>;
using json = nlohmann::json;

NCPolynomial parse_poly(const std::string& text, Grid grid, const CoeffTable* table = nullptr);

/// Parses a single monomial such as "x1_1 x2_1*" (empty text is the empty word).
Word parse_word(const std::string& text, Grid grid);

std::string format_double(double v);
std::string format_complex(Complex c);
std::string format_letter(const Letter& l);
std::string format_word(const Word& w);

/// Text form of a scalar (1×1) polynomial in graded-lex order.
std::string print_poly(const NCPolynomial& p);

/// Text form of a matrix-coefficient polynomial; coefficients are named
/// C1, C2, … in term order and returned through `names`.
std::string print_poly(const NCPolynomial& p, CoeffTable& names);

json to_json(const Mat& m);
Mat mat_from_json(const json& j);

json to_json(const MatrixTuple& x);
MatrixTuple tuple_from_json(const json& j);

json to_json(const LinearPencil& l);
LinearPencil pencil_from_json(const json& j);

json to_json(const TruncatedSeries& f);
TruncatedSeries series_from_json(const json& j);

CoeffTable coeff_table_from_json(const json& j);

/// Array of arrays of polynomial texts, each a scalar polynomial in
/// g variables x1..xg.
std::vector<std::vector<NCPolynomial>> poly_matrix_from_json(const json& j, int variables);
json poly_matrix_to_json(const std::vector<std::vector<NCPolynomial>>& m);

json read_json_file(const std::string& path);

}  // namespace ncball
