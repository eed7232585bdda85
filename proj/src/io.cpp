#include "ncball/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <variant>

#include "ncball/linalg.hpp"

namespace ncball {

namespace {

struct ParsedTerm {
  int sign = 1;
  Complex scalar{1.0, 0.0};
  std::vector<std::string> names;
  Word word;
};

class Parser {
 public:
  Parser(const std::string& text, Grid grid) : text_(text), grid_(grid) {}

  std::vector<ParsedTerm> parse_poly() {
    std::vector<ParsedTerm> terms;
    skip_ws();
    int sign = 1;
    if (take_sign(sign)) skip_ws();
    if (at_end()) fail("empty polynomial");
    terms.push_back(parse_term(sign));
    while (true) {
      skip_ws();
      if (at_end()) break;
      if (!take_sign(sign)) fail("expected '+' or '-'");
      skip_ws();
      terms.push_back(parse_term(sign));
    }
    return terms;
  }

  Word parse_word_only() {
    skip_ws();
    Word w;
    while (!at_end()) {
      if (!starts_letter()) fail("expected a letter");
      parse_letter(w);
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
      }
    }
    return w;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  void skip_ws() {
    while (!at_end()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (text_.compare(pos_, 2, "\xC2\xB7") == 0) {  // middle dot as product
        pos_ += 2;
      } else {
        break;
      }
    }
  }

  bool take_sign(int& sign) {
    if (peek() == '+') {
      ++pos_;
      sign = 1;
      return true;
    }
    if (peek() == '-') {
      ++pos_;
      sign = -1;
      return true;
    }
    if (text_.compare(pos_, 3, "\xE2\x88\x92") == 0) {  // U+2212 minus sign
      pos_ += 3;
      sign = -1;
      return true;
    }
    return false;
  }

  bool starts_letter() const { return peek() == 'x' && std::isdigit(static_cast<unsigned char>(peek(1))); }

  static bool starts_factor_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '(' || c == '_' || c == '.';
  }

  ParsedTerm parse_term(int sign) {
    ParsedTerm t;
    t.sign = sign;
    bool any = false;
    while (true) {
      skip_ws();
      if (at_end()) break;
      const char c = peek();
      if (c == '*' && any) {
        ++pos_;
        skip_ws();
        if (at_end() || !starts_factor_char(peek())) fail("expected a factor after '*'");
        continue;
      }
      if (starts_letter()) {
        parse_letter(t.word);
        if (peek() == '^') {
          ++pos_;
          const int power = parse_int("exponent");
          const Letter l = t.word.back();
          for (int k = 1; k < power; ++k) t.word.push_back(l);
          if (power == 0) t.word.pop_back();
        }
        any = true;
        continue;
      }
      if (c == '(' || std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        if (!t.word.empty()) fail("coefficient must precede the letters of a term");
        t.scalar *= parse_scalar();
        any = true;
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        if (!t.word.empty()) fail("coefficient must precede the letters of a term");
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        if (name == "i") {
          t.scalar *= Complex(0.0, 1.0);
        } else {
          t.names.push_back(std::move(name));
          name_positions_.push_back(start);
        }
        any = true;
        continue;
      }
      break;
    }
    if (!any) fail("expected a term");
    return t;
  }

  int parse_int(const char* what) {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    return std::stoi(text_.substr(start, pos_ - start));
  }

  double parse_float() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      pos_ += 2;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (start == pos_ || (pos_ - start == 1 && text_[start] == '.')) {
      pos_ = start;
      fail("expected a number");
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc()) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  Complex parse_scalar() {
    if (peek() != '(') {
      const double v = parse_float();
      if (peek() == 'i' && !std::isalnum(static_cast<unsigned char>(peek(1)))) {
        ++pos_;
        return {0.0, v};
      }
      return {v, 0.0};
    }
    ++pos_;
    skip_ws();
    int s0 = 1;
    if (take_sign(s0)) skip_ws();
    const double a = s0 * parse_float();
    skip_ws();
    Complex out;
    if (peek() == 'i') {
      ++pos_;
      out = {0.0, a};
    } else {
      int s1 = 1;
      if (!take_sign(s1)) fail("expected '+' or '-' in complex literal");
      skip_ws();
      double b = 1.0;
      if (peek() != 'i') b = parse_float();
      skip_ws();
      if (peek() != 'i') fail("expected 'i' in complex literal");
      ++pos_;
      out = {a, s1 * b};
    }
    skip_ws();
    if (peek() != ')') fail("expected ')'");
    ++pos_;
    return out;
  }

  void parse_letter(Word& w) {
    const std::size_t start = pos_;
    ++pos_;  // 'x'
    const std::size_t dstart = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    const std::string digits = text_.substr(dstart, pos_ - dstart);
    int row = 0;
    int col = 0;
    if (peek() == '_') {
      ++pos_;
      row = std::stoi(digits);
      col = parse_int("column index");
    } else if (grid_.cols == 1) {
      const int v = std::stoi(digits);
      if (v >= 1 && v <= grid_.rows) {
        row = v;
        col = 1;
      } else if (digits.size() >= 2 && digits.back() == '1') {
        row = std::stoi(digits.substr(0, digits.size() - 1));
        col = 1;
      } else {
        row = v;
        col = 1;
      }
    } else {
      if (digits.size() != 2) {
        pos_ = start;
        fail("ambiguous letter; write x<row>_<col>");
      }
      row = digits[0] - '0';
      col = digits[1] - '0';
    }
    if (row < 1 || row > grid_.rows || col < 1 || col > grid_.cols) {
      pos_ = start;
      fail("letter index out of grid " + to_string(grid_));
    }
    bool star = false;
    if (peek() == '*' && !starts_factor_char(peek(1))) {
      ++pos_;
      star = true;
    }
    w.push_back({row - 1, col - 1, star});
  }

 public:
  std::vector<std::size_t> name_positions_;

 private:
  const std::string& text_;
  Grid grid_;
  std::size_t pos_ = 0;
};

}  // namespace

NCPolynomial parse_poly(const std::string& text, Grid grid, const CoeffTable* table) {
  Parser parser(text, grid);
  auto terms = parser.parse_poly();

  std::optional<Shape> shape;
  for (const auto& t : terms) {
    for (const auto& n : t.names) {
      if (table == nullptr || table->find(n) == table->end()) throw Error("unknown coefficient name '" + n + "'");
    }
  }
  // Shape: the product of the named factors of any term that has names.
  auto term_matrix = [&](const ParsedTerm& t) -> std::optional<Mat> {
    if (t.names.empty()) return std::nullopt;
    Mat m = table->at(t.names[0]);
    for (std::size_t i = 1; i < t.names.size(); ++i) {
      const Mat& b = table->at(t.names[i]);
      if (m.cols() != b.rows()) throw ShapeError("coefficient product '" + t.names[i] + "' has incompatible shape");
      m = m * b;
    }
    return m;
  };
  for (const auto& t : terms) {
    if (auto m = term_matrix(t)) {
      Shape s{static_cast<int>(m->rows()), static_cast<int>(m->cols())};
      if (shape && !(*shape == s)) throw ShapeError("named coefficients have different shapes");
      shape = s;
    }
  }
  const Shape sh = shape.value_or(Shape{1, 1});
  NCPolynomial p(grid, sh);
  for (const auto& t : terms) {
    Mat c;
    if (auto m = term_matrix(t)) {
      c = *m;
    } else {
      if (sh.rows != sh.cols) throw ShapeError("scalar term in a polynomial with non-square coefficients");
      c = Mat::Identity(sh.rows, sh.cols);
    }
    p.add_term(t.word, c * (t.scalar * static_cast<double>(t.sign)));
  }
  return p;
}

Word parse_word(const std::string& text, Grid grid) {
  Parser parser(text, grid);
  return parser.parse_word_only();
}

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return format_double(c.real());
  if (c.real() == 0.0) return "(" + format_double(c.imag()) + "i)";
  std::string im = format_double(std::abs(c.imag()));
  return "(" + format_double(c.real()) + (c.imag() < 0 ? "-" : "+") + im + "i)";
}

std::string format_letter(const Letter& l) {
  return "x" + std::to_string(l.row + 1) + "_" + std::to_string(l.col + 1) + (l.star ? "*" : "");
}

std::string format_word(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_letter(w[i]);
  }
  return out;
}

namespace {

// Appends one term; `coeff` is already formatted and `negative` is the sign
// pulled out of a real coefficient.
void append_term(std::string& out, bool first, bool negative, const std::string& coeff, const Word& w) {
  if (first) {
    if (negative) out += "-";
  } else {
    out += negative ? " - " : " + ";
  }
  out += coeff;
  if (!coeff.empty() && !w.empty()) out += ' ';
  out += format_word(w);
}

}  // namespace

std::string print_poly(const NCPolynomial& p) {
  if (p.shape().rows != 1 || p.shape().cols != 1) {
    throw ShapeError("print_poly: matrix coefficients need a name table");
  }
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, a] : p.terms()) {
    const Complex c = a(0, 0);
    bool negative = false;
    std::string coeff;
    if (c.imag() == 0.0) {
      negative = c.real() < 0.0;
      const double mag = std::abs(c.real());
      if (!(mag == 1.0 && !w.empty())) coeff = format_double(mag);
    } else {
      coeff = format_complex(c);
    }
    append_term(out, first, negative, coeff, w);
    first = false;
  }
  return out;
}

std::string print_poly(const NCPolynomial& p, CoeffTable& names) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  int k = 0;
  for (const auto& [w, a] : p.terms()) {
    std::string name = "C" + std::to_string(++k);
    names[name] = a;
    append_term(out, first, false, name, w);
    first = false;
  }
  return out;
}

// ----------------------------------------------------------------------- JSON

json to_json(const Mat& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Mat mat_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw Error("matrix JSON needs rows, cols and data");
  }
  const Index r = j.at("rows").get<Index>();
  const Index c = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (!data.is_array() || static_cast<Index>(data.size()) != r * c) {
    throw ShapeError("matrix JSON: data has " + std::to_string(data.size()) + " entries, expected " +
                     std::to_string(r * c));
  }
  Mat m(r, c);
  for (Index k = 0; k < r * c; ++k) {
    const auto& e = data[k];
    Complex v;
    if (e.is_number()) {
      v = {e.get<double>(), 0.0};
    } else if (e.is_array() && e.size() == 2) {
      v = {e[0].get<double>(), e[1].get<double>()};
    } else {
      throw Error("matrix JSON: entries are numbers or [re, im] pairs");
    }
    m(k / c, k % c) = v;
  }
  return m;
}

json to_json(const MatrixTuple& x) {
  json rows = json::array();
  for (int r = 0; r < x.grid().rows; ++r) {
    json row = json::array();
    for (int c = 0; c < x.grid().cols; ++c) row.push_back(to_json(x.at(r, c)));
    rows.push_back(row);
  }
  return {{"gprime", x.grid().rows}, {"g", x.grid().cols}, {"level", x.level()}, {"entries", rows}};
}

MatrixTuple tuple_from_json(const json& j) {
  const Grid grid{j.at("gprime").get<int>(), j.at("g").get<int>()};
  const auto& rows = j.at("entries");
  if (static_cast<int>(rows.size()) != grid.rows) throw ShapeError("tuple JSON: wrong number of entry rows");
  std::vector<Mat> entries;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != grid.cols) throw ShapeError("tuple JSON: wrong number of entries in a row");
    for (const auto& e : row) entries.push_back(mat_from_json(e));
  }
  MatrixTuple x(grid, std::move(entries));
  if (j.contains("level") && j.at("level").get<Index>() != x.level()) throw ShapeError("tuple JSON: level mismatch");
  return x;
}

json to_json(const LinearPencil& l) {
  json rows = json::array();
  for (int r = 0; r < l.grid().rows; ++r) {
    json row = json::array();
    for (int c = 0; c < l.grid().cols; ++c) row.push_back(to_json(l.at(r, c)));
    rows.push_back(row);
  }
  return {{"gprime", l.grid().rows},
          {"g", l.grid().cols},
          {"dprime", l.shape().rows},
          {"d", l.shape().cols},
          {"coeffs", rows}};
}

LinearPencil pencil_from_json(const json& j) {
  const Grid grid{j.at("gprime").get<int>(), j.at("g").get<int>()};
  const auto& rows = j.at("coeffs");
  if (static_cast<int>(rows.size()) != grid.rows) throw ShapeError("pencil JSON: wrong number of coefficient rows");
  std::vector<Mat> coeffs;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != grid.cols) throw ShapeError("pencil JSON: wrong row length");
    for (const auto& e : row) coeffs.push_back(mat_from_json(e));
  }
  LinearPencil l(grid, std::move(coeffs));
  if (j.contains("dprime") && j.at("dprime").get<int>() != l.shape().rows) throw ShapeError("pencil JSON: dprime");
  if (j.contains("d") && j.at("d").get<int>() != l.shape().cols) throw ShapeError("pencil JSON: d");
  return l;
}

json to_json(const TruncatedSeries& f) {
  json parts = json::array();
  for (const auto& p : f.parts()) {
    json terms = json::array();
    for (const auto& [w, c] : p.terms()) terms.push_back({{"word", format_word(w)}, {"coeff", to_json(c)}});
    parts.push_back(terms);
  }
  return {{"gprime", f.grid().rows},
          {"g", f.grid().cols},
          {"dprime", f.shape().rows},
          {"d", f.shape().cols},
          {"parts", parts}};
}

TruncatedSeries series_from_json(const json& j) {
  const json& parts = j.is_array() ? j : j.at("parts");
  if (!parts.is_array() || parts.empty()) throw Error("series JSON: parts must be a non-empty list");
  Grid grid{1, 1};
  std::optional<Shape> shape;
  if (j.is_object()) {
    grid = {j.at("gprime").get<int>(), j.at("g").get<int>()};
    if (j.contains("dprime") && j.contains("d")) shape = Shape{j.at("dprime").get<int>(), j.at("d").get<int>()};
  } else {
    // Bare list: the grid is the bounding box of the letters used. Plain
    // letters x<k> are read as a column of variables.
    auto bounding = [&](Grid wide) {
      Grid box{1, 1};
      for (const auto& part : parts)
        for (const auto& t : part)
          for (const auto& l : parse_word(t.at("word").get<std::string>(), wide)) {
            box.rows = std::max(box.rows, l.row + 1);
            box.cols = std::max(box.cols, l.col + 1);
          }
      return box;
    };
    try {
      grid = bounding(Grid{99, 1});
    } catch (const ParseError&) {
      grid = bounding(Grid{99, 99});
    }
  }
  std::vector<std::pair<Word, Mat>> terms;
  for (std::size_t a = 0; a < parts.size(); ++a) {
    for (const auto& t : parts[a]) {
      Word w = parse_word(t.at("word").get<std::string>(), grid);
      if (w.size() != a) {
        throw Error("series JSON: word '" + t.at("word").get<std::string>() + "' listed in part " + std::to_string(a));
      }
      Mat c = mat_from_json(t.at("coeff"));
      if (!shape) shape = Shape{static_cast<int>(c.rows()), static_cast<int>(c.cols())};
      terms.emplace_back(std::move(w), std::move(c));
    }
  }
  if (!shape) shape = Shape{1, 1};
  TruncatedSeries f(grid, *shape, static_cast<int>(parts.size()) - 1);
  NCPolynomial p(grid, *shape);
  for (const auto& [w, c] : terms) p.add_term(w, c);
  f.add(p);
  return f;
}

CoeffTable coeff_table_from_json(const json& j) {
  CoeffTable out;
  for (const auto& [name, m] : j.items()) out[name] = mat_from_json(m);
  return out;
}

std::vector<std::vector<NCPolynomial>> poly_matrix_from_json(const json& j, int variables) {
  if (!j.is_array() || j.empty()) throw Error("polynomial matrix JSON must be a non-empty array of rows");
  std::vector<std::vector<NCPolynomial>> out;
  std::size_t cols = 0;
  for (const auto& row : j) {
    if (!row.is_array()) throw Error("polynomial matrix JSON: rows must be arrays");
    if (!out.empty() && row.size() != cols) throw ShapeError("polynomial matrix JSON: ragged rows");
    cols = row.size();
    std::vector<NCPolynomial> r;
    for (const auto& e : row) r.push_back(parse_poly(e.get<std::string>(), Grid{variables, 1}));
    out.push_back(std::move(r));
  }
  return out;
}

json poly_matrix_to_json(const std::vector<std::vector<NCPolynomial>>& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& p : row) r.push_back(print_poly(p));
    out.push_back(r);
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace ncball
