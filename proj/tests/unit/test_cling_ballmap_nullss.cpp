#include <doctest.h>

#include <cmath>

#include "ncball/ballmap.hpp"
#include "ncball/clinging.hpp"
#include "ncball/examples.hpp"
#include "ncball/io.hpp"
#include "ncball/linalg.hpp"
#include "ncball/nullss.hpp"
#include "ncball/random.hpp"
#include "oracles.hpp"

using namespace ncball;

namespace {

Mat scalar(Complex c) { return Mat::Constant(1, 1, c); }

// The two-variable distinguished isometry that is not completely isometric.
LinearPencil two_variable_example() {
  const double r = std::sqrt(2.0) / 2.0;
  Mat a = Mat::Zero(4, 3), b = Mat::Zero(4, 3);
  a(0, 0) = 1.0;
  a(1, 1) = r;
  a(3, 2) = r;
  b(1, 0) = r;
  b(2, 1) = 1.0;
  b(3, 2) = r;
  return LinearPencil(Grid{2, 1}, {a, b});
}

// Δ(x, y) written out entrywise: [½y*y, −½y*x, 0; −½x*y, ½x*x, 0; 0, 0, ½(x−y)*(x−y)].
Mat displayed_delta(const Mat& x, const Mat& y) {
  const Index n = x.rows();
  Mat out = Mat::Zero(3 * n, 3 * n);
  out.block(0, 0, n, n) = 0.5 * y.adjoint() * y;
  out.block(0, n, n, n) = -0.5 * y.adjoint() * x;
  out.block(n, 0, n, n) = -0.5 * x.adjoint() * y;
  out.block(n, n, n, n) = 0.5 * x.adjoint() * x;
  out.block(2 * n, 2 * n, n, n) = 0.5 * (x - y).adjoint() * (x - y);
  return out;
}

NCPolynomial scalar_poly(const std::string& text, int variables) { return parse_poly(text, Grid{variables, 1}); }

PolyMatrix row_matrix(std::initializer_list<std::string> texts, int variables) {
  std::vector<NCPolynomial> row;
  for (const auto& t : texts) row.push_back(scalar_poly(t, variables));
  return pack_poly_matrix({row}, variables);
}

TruncatedSeries series_of(const NCPolynomial& p, int degree) { return TruncatedSeries::from_polynomial(p, degree); }

// h(x) = V diag(x, c·x^2) U* on the 1×1 grid, d' = d = 2.
TruncatedSeries rotated_square_map(const Mat& v, const Mat& u, Complex c) {
  const Grid grid{1, 1};
  Mat e11 = Mat::Zero(2, 2), e22 = Mat::Zero(2, 2);
  e11(0, 0) = 1.0;
  e22(1, 1) = c;
  NCPolynomial p = NCPolynomial::monomial(grid, {Letter{0, 0, false}}, v * e11 * u.adjoint());
  p.add_term({Letter{0, 0, false}, Letter{0, 0, false}}, v * e22 * u.adjoint());
  return series_of(p, 3);
}

int words_not_ending_in_first_letter(int letters, int max_len) {
  int count = 1;  // empty word
  long long all = 1;
  for (int len = 1; len <= max_len; ++len) {
    all *= letters;
    count += static_cast<int>(all / letters * (letters - 1));
  }
  return count;
}

}  // namespace

TEST_SUITE("clinging") {
  TEST_CASE("gram matrices of simple pencils") {
    LinearPencil zero(Grid{2, 1}, {Mat::Zero(2, 2), Mat::Zero(2, 2)});
    CHECK(gram_of_delta(zero).g_mat == Mat::Identity(4, 4));
    LinearPencil ident(Grid{1, 1}, {scalar(1.0)});
    CHECK(gram_of_delta(ident).g_mat.isZero());

    auto big = delta_psd(gram_of_delta(LinearPencil(Grid{1, 1}, {scalar(std::sqrt(2.0))})));
    CHECK_FALSE(big.psd);
    CHECK(big.min_eigenvalue == doctest::Approx(-1.0));
    REQUIRE(big.witness.has_value());
    CHECK(big.witness_value < 0.0);
  }

  TEST_CASE("the two-variable example matches its displayed Δ") {
    LinearPencil l = two_variable_example();
    Rng rng(50);
    for (int n = 1; n <= 3; ++n) {
      MatrixTuple x = random_tuple(Grid{2, 1}, n, 1.0, rng);
      CHECK(oracle::max_abs_diff(delta_eval(l, x), displayed_delta(x.at(0, 0), x.at(1, 0))) < 1e-14);
    }
    GramMatrix g = gram_of_delta(l);
    Mat expected = Mat::Zero(6, 6);
    expected(1, 1) = expected(2, 2) = 0.5;
    expected(3, 3) = expected(5, 5) = 0.5;
    expected(1, 3) = expected(3, 1) = -0.5;
    expected(2, 5) = expected(5, 2) = -0.5;
    CHECK(oracle::max_abs_diff(g.g_mat, expected) < 1e-15);

    MatrixTuple p(Grid{2, 1}, 2);
    p.at(0, 0)(0, 0) = 1.0;
    p.at(1, 0)(1, 0) = 1.0;
    CHECK(oracle::norm2(p.flatten()) == doctest::Approx(std::sqrt(2.0)));
    CHECK(oracle::norm2(pencil_eval(l, p)) == doctest::Approx(std::sqrt(1.5)));
    CHECK_FALSE(certify_complete_isometry(l).accepted);
  }

  TEST_CASE("gram form agrees with direct evaluation") {
    Rng rng(51);
    for (int trial = 0; trial < 100; ++trial) {
      const int g = 1 + trial % 3;
      const Index d = 1 + trial % 2;
      std::vector<Mat> a;
      for (int j = 0; j < g; ++j) a.push_back(ginibre(2, d, rng));
      LinearPencil l(Grid{g, 1}, a);
      MatrixTuple x = random_tuple(Grid{g, 1}, 1 + trial % 3, 1.0, rng);
      CHECK(oracle::max_abs_diff(gram_form_eval(gram_of_delta(l), x), delta_eval(l, x)) < 1e-12);
    }
  }

  TEST_CASE("planted negative directions give witnesses") {
    Rng rng(52);
    for (int trial = 0; trial < 20; ++trial) {
      Mat a = random_with_norm(2, 2, 1.0 + 0.5 * uniform(rng), rng);
      LinearPencil l(Grid{2, 1}, {a, random_with_norm(2, 2, 0.3, rng)});
      auto r = delta_psd(gram_of_delta(l));
      CHECK_FALSE(r.psd);
      REQUIRE(r.witness.has_value());
      CHECK(linalg::min_eigen(delta_eval(l, *r.witness)).value < 0.0);
    }
  }

  TEST_CASE("scalar clinging of the two-variable example") {
    GramMatrix g = gram_of_delta(two_variable_example());
    CHECK(delta_psd(g).psd);
    auto s = clinging_scalar(g, 1);
    CHECK(s.clings);
    CHECK(s.kernel.exact_path);
    CHECK(s.kernel.dim() == 4);
    CHECK(s.kernel.t == 3);
    CHECK(s.kernel.m == 1);
    CHECK(s.kernel.kernel_residual < 1e-9);
    for (int i = 0; i < s.kernel.dim(); ++i) CHECK((g.g_mat * s.kernel.eta(i)).norm() < 1e-9);
    CHECK(theorem_9_4_applies(s.kernel));

    auto sampled = clinging_scalar_sampled(g, 256, 2);
    CHECK(sampled.clings);
    CHECK(sampled.kernel.dim() == 4);
  }

  TEST_CASE("zero gram matrix clings everywhere") {
    GramMatrix g{2, 2, Mat::Zero(4, 4)};
    auto s = clinging_scalar(g, 3);
    CHECK(s.clings);
    CHECK(s.kernel.t == 2);
    CHECK(s.kernel.m == 2);
  }

  TEST_CASE("exact and sampled paths agree for two variables") {
    Rng rng(53);
    int agree = 0;
    for (int trial = 0; trial < 50; ++trial) {
      // Orthogonal sum of a random isometric pencil piece and a contraction piece.
      const Index d = 2 + trial % 2;
      Mat q = random_isometry(2 * d, d, rng);
      std::vector<Mat> a{Mat(q.topRows(d)), Mat(q.bottomRows(d))};
      if (trial % 3 == 0) a[1] = random_with_norm(d, d, 0.5, rng);
      LinearPencil l(Grid{2, 1}, a);
      GramMatrix g = gram_of_delta(l);
      auto exact = clinging_scalar(g, static_cast<std::uint64_t>(trial));
      auto sampled = clinging_scalar_sampled(g, 512, static_cast<std::uint64_t>(trial));
      if (exact.clings == sampled.clings && exact.kernel.dim() == sampled.kernel.dim()) ++agree;
    }
    CHECK(agree == 50);

    // Clinging instances: the two-variable example plus a contraction block, rotated.
    int clinging_agree = 0;
    for (int trial = 0; trial < 20; ++trial) {
      GramMatrix g = gram_of_delta(examples::rotated_clinging_pencil(trial % 3, rng));
      auto exact = clinging_scalar(g, static_cast<std::uint64_t>(trial));
      auto sampled = clinging_scalar_sampled(g, 512, static_cast<std::uint64_t>(trial));
      CHECK(exact.clings);
      if (exact.clings == sampled.clings && exact.kernel.dim() == sampled.kernel.dim()) ++clinging_agree;
    }
    CHECK(clinging_agree == 20);
  }

  TEST_CASE("orthotropic check") {
    CHECK(orthotropic_check(two_variable_example()).pass);
    CHECK(orthotropic_check(LinearPencil(Grid{1, 1}, {Mat::Identity(2, 2)})).pass);
    Mat a1 = Mat::Zero(2, 2), a2 = Mat::Zero(2, 2);
    a1(0, 0) = 1.0;
    a1(1, 1) = 0.5;
    a2(0, 1) = 0.3;
    auto r = orthotropic_check(LinearPencil(Grid{2, 1}, {a1, a2}));
    CHECK_FALSE(r.pass);
    REQUIRE(r.offdiag_norms.size() == 1);
    CHECK(r.offdiag_norms[0] == doctest::Approx(0.3));
  }

  TEST_CASE("bind system rank counts") {
    GramMatrix g = gram_of_delta(two_variable_example());
    auto s = clinging_scalar(g, 1);
    Rng rng(54);
    auto r = bind_system_solve(s.kernel, {ginibre(2, 2, rng)});
    CHECK(r.solvable);
    CHECK(r.equations == s.kernel.t * 2);
    CHECK(r.unknowns == s.kernel.dim() * 2);

    BindingKernel k;
    k.g = 3;
    k.d = 1;
    k.alphas = {Vec::Ones(3)};
    k.vs = {Vec::Ones(1)};
    k.t = 1;
    k.m = 0;
    k.gamma = Mat::Zero(0, 1);
    auto trivial = bind_system_solve(k, {ginibre(2, 2, rng), ginibre(2, 2, rng)});
    CHECK_FALSE(trivial.solvable);
    auto free = bind_system_solve(k, {Mat::Identity(2, 2), Mat::Identity(2, 2)});
    CHECK(free.solvable);

    BindingKernel synthetic = k;
    synthetic.t = 2;
    synthetic.m = 1;
    CHECK_FALSE(theorem_9_4_applies(synthetic));
  }

  TEST_CASE("matrix clinging of the two-variable example") {
    auto r = matrix_clinging_sample(two_variable_example(), 4, 100, 7);
    CHECK(r.psd);
    CHECK(r.clings_scalar);
    CHECK(r.applies_9_4);
    CHECK(r.verdict == ClingVerdict::proved_by_9_4);
    CHECK(r.max_sample <= 1e-8);
  }

  TEST_CASE("three-variable search filters") {
    CHECK(three_var_search(0, 1).candidates.empty());
    LinearPencil two = two_variable_example();
    LinearPencil lifted(Grid{3, 1}, {two.coeffs()[0], two.coeffs()[1], Mat::Zero(4, 3)});
    CHECK_FALSE(search_filters(lifted, 1));
    auto a = three_var_search(3, 11), b = three_var_search(3, 11);
    CHECK(a.constructed == b.constructed);
    CHECK(a.candidates.size() == b.candidates.size());
  }
}

TEST_SUITE("ballmap") {
  TEST_CASE("linear part extraction") {
    Rng rng(60);
    Mat m = random_isometry(3, 2, rng);
    NCPolynomial p = NCPolynomial::linear(Grid{2, 1}, {Mat(m.col(0)), Mat(m.col(1))});
    p.add_term({Letter{0, 0, false}, Letter{1, 0, false}}, ginibre(3, 1, rng));
    LinearMatrixMap l = linear_part(series_of(p, 2));
    CHECK(l.coeffs()[0] == Mat(m.col(0)));
    p.add_term({}, ginibre(3, 1, rng));
    CHECK_THROWS_AS(linear_part(series_of(p, 2)), PreconditionError);
  }

  TEST_CASE("canonical form recovers the inner map") {
    Rng rng(61);
    Mat v = random_unitary(2, rng), u = random_unitary(2, rng);
    auto a = canonical_form_zero(rotated_square_map(v, u, 0.5), 1e-8, 1);
    REQUIRE(a.accepted);
    REQUIRE(a.tilde_h.has_value());
    const Word xx{Letter{0, 0, false}, Letter{0, 0, false}};
    CHECK(std::abs(a.tilde_h->part(2).coeff(xx)(0, 0)) == doctest::Approx(0.5));
    CHECK(a.reconstruction_residual <= 1e-9);

    Mat m = random_isometry(3, 1, rng);
    auto lin = canonical_form_zero(series_of(NCPolynomial::linear(Grid{1, 1}, {m}), 2));
    REQUIRE(lin.accepted);
    CHECK(lin.tilde_shape.cols == 0);
  }

  TEST_CASE("planted off-diagonal block is named") {
    const Grid grid{1, 1};
    Mat e11 = Mat::Zero(2, 2), b2 = Mat::Zero(2, 2);
    e11(0, 0) = 1.0;
    b2(0, 1) = 0.1;
    NCPolynomial p = NCPolynomial::monomial(grid, {Letter{0, 0, false}}, e11);
    p.add_term({Letter{0, 0, false}, Letter{0, 0, false}}, b2);
    auto a = canonical_form_zero(series_of(p, 2));
    CHECK_FALSE(a.accepted);
    REQUIRE(a.violation.has_value());
    CHECK(a.violation->alpha == 2);
    CHECK(a.violation->block == "b2");
    CHECK(a.violation->norm == doctest::Approx(0.1));
  }

  TEST_CASE("seeded round trips for both basepoint cases") {
    Rng rng(62);
    int zero_ok = 0, general_ok = 0;
    for (int trial = 0; trial < 50; ++trial) {
      Mat v = random_unitary(2, rng), u = random_unitary(2, rng);
      TruncatedSeries h = rotated_square_map(v, u, 0.3 + 0.6 * uniform(rng));
      auto a = canonical_form_zero(h, 1e-8, static_cast<std::uint64_t>(trial));
      if (a.accepted && a.reconstruction_residual <= 1e-8) ++zero_ok;
      MoebiusParams mp(random_with_norm(2, 2, 0.7 * uniform(rng), rng));
      auto b = canonical_form_general(moebius_compose_series(mp, h, 3), 1e-8, static_cast<std::uint64_t>(trial));
      if (b.accepted && b.via_moebius && b.round_trip_residual <= 1e-8) ++general_ok;
    }
    CHECK(zero_ok == 50);
    CHECK(general_ok == 50);
  }

  TEST_CASE("constant maps normalize to zero") {
    Rng rng(63);
    Mat v = random_with_norm(2, 2, 0.5, rng);
    TruncatedSeries f = series_of(NCPolynomial::constant(Grid{1, 1}, v), 2);
    MoebiusParams p(v);
    TruncatedSeries phi = moebius_compose_series(p, f, 2);
    for (const auto& part : phi.parts()) CHECK(part.distance(NCPolynomial(Grid{1, 1}, Shape{2, 2})) < 1e-12);
  }

  TEST_CASE("pencil composition") {
    Rng rng(64);
    Mat v = random_unitary(2, rng), u = random_unitary(2, rng);
    TruncatedSeries h = rotated_square_map(v, u, 0.5);
    auto a = pencil_ball_map_form(LinearPencil::ball_pencil(Grid{2, 2}), h, 1e-8, 2);
    CHECK(a.accepted);
    CHECK_FALSE(a.via_moebius);

    TruncatedSeries moved = h;
    Mat corner = Mat::Zero(2, 2);
    corner(0, 0) = 1.0;
    moved.add(NCPolynomial::constant(Grid{1, 1}, corner));
    CHECK_THROWS_AS(pencil_ball_map_form(LinearPencil::ball_pencil(Grid{2, 2}), moved), PreconditionError);
  }

  TEST_CASE("schwarz suite") {
    const Grid grid{1, 1};
    SuiteOptions opts;
    opts.samples = 40;
    opts.seed = 5;
    auto ident = schwarz_suite(TruncatedSeries::identity(grid, 2), opts);
    CHECK(ident.pass);
    CHECK(std::abs(ident.min_eigenvalue) < 1e-12);
    auto sq = schwarz_suite(series_of(scalar_poly("x1^2", 1), 2), opts);
    CHECK(sq.pass);
    CHECK(sq.min_eigenvalue >= -1e-12);
    auto sym = schwarz_suite(series_of(scalar_poly("0.5 x1 x2 + 0.5 x2 x1", 2), 2), opts);
    CHECK(sym.pass);

    opts.stop_on_failure = true;
    auto bad = schwarz_suite(series_of(scalar_poly("1.2 x1", 1), 1), opts);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.first_failure.has_value());
    CHECK(bad.first_failure->sample < 3);
  }

  TEST_CASE("schwarz suite accepts constructed ball maps") {
    Rng rng(65);
    for (int trial = 0; trial < 5; ++trial) {
      Mat v = random_unitary(2, rng), u = random_unitary(2, rng);
      SuiteOptions opts;
      opts.samples = 30;
      opts.seed = static_cast<std::uint64_t>(trial);
      CHECK(schwarz_suite(rotated_square_map(v, u, 0.9), opts).pass);
    }
  }

  TEST_CASE("scott suite") {
    SuiteOptions opts;
    opts.samples = 40;
    opts.seed = 6;
    auto one = scott_suite({series_of(NCPolynomial::constant(Grid{1, 1}, scalar(1.0)), 1)}, opts);
    CHECK(one.implication_violations == 0);
    CHECK(one.hypothesis_held > 0);
    CHECK(one.min_conclusion == doctest::Approx(0.0).epsilon(1e-12));

    TruncatedSeries half = series_of(NCPolynomial::constant(Grid{2, 1}, scalar(0.5)), 1);
    auto two = scott_suite({half, half}, opts);
    CHECK(two.implication_violations == 0);
    CHECK(two.min_conclusion == doctest::Approx(0.5));

    // H = h(x)·[c_1 c_2] with ‖h(X)‖ ≤ 1 and ‖c‖ < 1 satisfies the hypothesis on the whole ball.
    Rng rng(66);
    for (int trial = 0; trial < 5; ++trial) {
      Vec c = ginibre(2, 1, rng).col(0);
      c *= 0.95 / c.norm();
      NCPolynomial h = scalar_poly("x1 x2", 2);
      auto rnd = scott_suite({series_of(h * c(0), 2), series_of(h * c(1), 2)}, opts);
      CHECK(rnd.hypothesis_everywhere);
      CHECK(rnd.implication_violations == 0);
      CHECK(rnd.min_conclusion >= -1e-7);
    }

    // A large constant satisfies the hypothesis only near the origin.
    auto big = scott_suite({series_of(NCPolynomial::constant(Grid{1, 1}, scalar(5.0)), 1)}, opts);
    CHECK_FALSE(big.hypothesis_everywhere);
    CHECK(big.implication_violations == 0);
  }

  TEST_CASE("bidisk decomposition") {
    Rng rng(67);
    Mat m = random_isometry(3, 2, rng);
    TruncatedSeries iso = series_of(NCPolynomial::linear(Grid{2, 1}, {Mat(m.col(0)), Mat(m.col(1))}), 2);
    auto full = bidisk_decompose(iso, 1e-10, 2, 5, 1);
    CHECK(full.pass);
    CHECK(full.s.cols() == 2);
    for (const auto& p : full.p_parts) CHECK(p.is_zero());
    auto assembled = bidisk_assemble(full, Grid{2, 1}, Shape{3, 1});
    CHECK(canonical_form_zero(assembled).accepted);

    // h(x) = [x1; ½ x2²].
    NCPolynomial h(Grid{2, 1}, Shape{2, 1});
    Mat e1 = Mat::Zero(2, 1), e2 = Mat::Zero(2, 1);
    e1(0, 0) = 1.0;
    e2(1, 0) = 0.5;
    h.add_term({Letter{0, 0, false}}, e1);
    h.add_term({Letter{1, 0, false}, Letter{1, 0, false}}, e2);
    auto dec = bidisk_decompose(series_of(h, 2), 1e-10, 3, 10, 2);
    CHECK(dec.pass);
    CHECK(dec.s.cols() == 1);
    REQUIRE(dec.p_parts.size() == 1);
    CHECK(dec.factor_residuals[0] <= 1e-10);
    CHECK(dec.orth_parts <= 1e-8);
    CHECK(bidisk_assemble(dec, Grid{2, 1}, Shape{2, 1}).distance(series_of(h, 2)) <= 1e-10);

    NCPolynomial strict = NCPolynomial::linear(Grid{2, 1}, {Mat(0.5 * e1), Mat(0.5 * e1)});
    CHECK_THROWS_AS(bidisk_decompose(series_of(strict, 2)), PreconditionError);
  }

  TEST_CASE("maximum principle sampling") {
    auto c = maximum_principle_sample(series_of(NCPolynomial::constant(Grid{1, 1}, scalar(0.3)), 1), 1, 1, 5, 1);
    CHECK(c.pass);
    CHECK(c.max_boundary == doctest::Approx(0.3));
    auto x = maximum_principle_sample(TruncatedSeries::identity(Grid{1, 1}, 1), 1, 1, 10, 2);
    CHECK(x.pass);
    CHECK(x.max_boundary == doctest::Approx(1.0));
    CHECK(x.max_interior < 1.0);
    auto xy = maximum_principle_sample(series_of(parse_poly("x11 x22", Grid{2, 2}), 2), 2, 2, 10, 3);
    CHECK(xy.pass);

    Mat u = random_partial_isometry_point(4, 4, 2, 9);
    CHECK(isometric_rank(u) == 2);
  }
}

TEST_SUITE("nullss") {
  TEST_CASE("identity cofactor") {
    PolyMatrix p = row_matrix({"x1 + x2 x1", "x2"}, 2);
    auto r = cofactor_solve(p, p, 2);
    REQUIRE(r.success);
    CHECK(r.degree_used == 0);
    CHECK(r.exact_verified);
    CHECK(r.g == NCPolynomial::constant(Grid{2, 1}, Mat::Identity(1, 1)));
  }

  TEST_CASE("left multiple is found at degree one") {
    PolyMatrix p = row_matrix({"x1"}, 2), q = row_matrix({"x2 x1"}, 2);
    auto r = cofactor_solve(p, q, 3);
    REQUIRE(r.success);
    CHECK(r.degree_used == 1);
    CHECK(r.residual == 0.0);
    CHECK(r.g == row_matrix({"x2"}, 2));

    auto f = cofactor_solve(p, q, 3, SolveMode::floating);
    REQUIRE(f.success);
    CHECK(f.residual <= 1e-10);
  }

  TEST_CASE("failure carries a kernel counterexample") {
    PolyMatrix p = row_matrix({"x1"}, 2), q = row_matrix({"x2"}, 2);
    auto r = cofactor_solve(p, q, 3, SolveMode::exact, 4);
    CHECK_FALSE(r.success);
    CHECK(r.min_residual > 0.1);
    CHECK((r.counterexample.has_value() || r.budget_exhausted));
    REQUIRE(r.counterexample.has_value());
    const auto& ce = *r.counterexample;
    CHECK(eval_poly(p, ce.point).lazyProduct(ce.vector).norm() < 1e-8);
    CHECK(ce.q_norm > 1e-3);
  }

  TEST_CASE("seeded products are recovered exactly") {
    Rng rng(70);
    int recovered = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const int g = 1 + trial % 3;
      const int d = 1 + trial % 2;
      const int m = 1 + (trial / 2) % 2;
      PolyMatrix p = random_integer_poly(Grid{g, 1}, Shape{m, d}, 0, 2, 0.5, 2, rng);
      PolyMatrix g0 = random_integer_poly(Grid{g, 1}, Shape{1, m}, 0, 2, 0.5, 2, rng);
      if (p.is_zero()) p = NCPolynomial::constant(Grid{g, 1}, Mat::Ones(m, d));
      PolyMatrix q = g0 * p;
      auto r = cofactor_solve(p, q, default_cofactor_degree(p, q));
      if (r.success && r.exact_verified && r.residual == 0.0 && (r.g * p).distance(q) == 0.0) ++recovered;
    }
    CHECK(recovered == 20);
  }

  TEST_CASE("kernel hypothesis") {
    PolyMatrix p = row_matrix({"x1"}, 2);
    auto same = kernel_hypothesis_check(p, p, 3, 20, 1);
    CHECK(same.holds);
    CHECK(same.sampling_max_residual < 1e-12);
    auto multiple = kernel_hypothesis_check(p, row_matrix({"x2 x1"}, 2), 3, 20, 2);
    CHECK(multiple.holds);
    CHECK(multiple.verdict == "holds");
    auto other = kernel_hypothesis_check(p, row_matrix({"x2"}, 2), 3, 20, 3);
    CHECK_FALSE(other.holds);
    CHECK(other.verdict == "fails");
    REQUIRE(other.counterexample.has_value());

    MatrixTuple w(Grid{2, 1}, 1);
    w.at(1, 0) = Mat::Identity(1, 1);
    CHECK(eval_poly(p, w).isZero());
    CHECK(eval_poly(row_matrix({"x2"}, 2), w).norm() == 1.0);
  }

  TEST_CASE("quotient models") {
    auto q = quotient_model(row_matrix({"x1"}, 2), 2);
    CHECK(q.stabilized);
    CHECK(q.ambient_dim == 7);
    CHECK(q.dim == words_not_ending_in_first_letter(2, 2));
    CHECK(q.dim == 4);
    CHECK(q.well_defined_defect < 1e-10);

    auto z = quotient_model(NCPolynomial(Grid{2, 1}, Shape{1, 1}), 2);
    CHECK(z.dim == 7);

    auto two = quotient_model(row_matrix({"x1", "x2"}, 2), 2);
    CHECK(two.stabilized);
    CHECK(two.ambient_dim == 14);
    auto member = kernel_hypothesis_check(row_matrix({"x1", "x2"}, 2), row_matrix({"x2 x1", "x2 x2"}, 2), 2, 20, 4);
    CHECK(member.holds);
    CHECK(member.membership_residual < 1e-10);
  }

  TEST_CASE("packing round trip") {
    auto entries = unpack_poly_matrix(row_matrix({"x1 + 2 x2", "0", "x2 x1"}, 2));
    REQUIRE(entries.size() == 1);
    REQUIRE(entries[0].size() == 3);
    CHECK(entries[0][1].is_zero());
    CHECK(entries[0][2] == scalar_poly("x2 x1", 2));
  }
}
