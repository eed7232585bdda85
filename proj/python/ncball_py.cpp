#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncball/ballmap.hpp"
#include "ncball/clinging.hpp"
#include "ncball/fock.hpp"
#include "ncball/io.hpp"
#include "ncball/isometry.hpp"
#include "ncball/moebius.hpp"
#include "ncball/nullss.hpp"
#include "ncball/suite.hpp"

namespace py = pybind11;
using namespace ncball;

namespace {

// Structured arguments cross the boundary as JSON text in the CLI file formats.
json parse(const std::string& text) { return json::parse(text); }

MatrixTuple tuple_of(int rows, int cols, const std::vector<Mat>& entries) {
  return MatrixTuple(Grid{rows, cols}, entries);
}

py::dict certificate_dict(const CompleteIsometryCertificate& c) {
  py::dict d;
  d["u"] = c.u;
  d["v"] = c.v;
  d["phi"] = c.phi.coeffs();
  d["residual"] = c.residual;
  return d;
}

py::dict analysis_dict(const BallMapAnalysis& a) {
  py::dict d;
  d["accepted"] = a.accepted;
  d["stage"] = a.stage;
  d["message"] = a.message;
  d["max_offdiag"] = a.max_offdiag;
  d["reconstruction_residual"] = a.reconstruction_residual;
  d["via_moebius"] = a.via_moebius;
  if (a.cert) d["certificate"] = certificate_dict(*a.cert);
  if (a.tilde_h) d["tilde_h"] = to_json(*a.tilde_h).dump();
  if (a.violation) d["violation"] = py::make_tuple(a.violation->alpha, a.violation->block, a.violation->norm);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matrix-ball maps in free noncommutative variables";

  py::register_exception<Error>(m, "NcballError", PyExc_ValueError);

  m.def(
      "parse_poly",
      [](const std::string& text, int rows, int cols) { return print_poly(parse_poly(text, Grid{rows, cols})); },
      py::arg("text"), py::arg("grid_rows") = 1, py::arg("grid_cols") = 1, "Parse and print in canonical form.");

  m.def(
      "eval_poly",
      [](const std::string& text, int rows, int cols, const std::vector<Mat>& point) {
        return eval_poly(parse_poly(text, Grid{rows, cols}), tuple_of(rows, cols, point));
      },
      py::arg("text"), py::arg("grid_rows"), py::arg("grid_cols"), py::arg("point"),
      "Evaluate Σ a_w ⊗ w(X) at a point given as row-major entries.");

  m.def(
      "classify_ball",
      [](int rows, int cols, const std::vector<Mat>& point, double tol) {
        const BallVerdict v = classify_ball(tuple_of(rows, cols, point), tol);
        return py::make_tuple(to_string(v.status), v.norm);
      },
      py::arg("grid_rows"), py::arg("grid_cols"), py::arg("point"), py::arg("tol") = kBallTol);

  m.def(
      "moebius_apply", [](const Mat& v, const Mat& u) { return moebius_apply(MoebiusParams(v), u).value; },
      py::arg("v"), py::arg("u"), "F_v(U) with v lifted to the level of U.");

  m.def(
      "fock_identities",
      [](int gprime, int g, int n) {
        const auto r = check_bigX_identities(build_bigX(gprime, g, n));
        py::dict d;
        d["level"] = r.level;
        d["star_product"] = r.star_product;
        d["product_star"] = r.product_star;
        d["nilpotent"] = r.nilpotent;
        return d;
      },
      py::arg("gprime"), py::arg("g"), py::arg("n"));

  m.def(
      "certify_isometry",
      [](int rows, int cols, const std::vector<Mat>& coeffs, double tol, std::uint64_t seed) {
        const auto c = certify_complete_isometry(LinearMatrixMap(Grid{rows, cols}, coeffs), tol, seed);
        py::dict d;
        d["accepted"] = c.accepted;
        d["stage"] = c.stage;
        d["residual"] = c.residual;
        if (c.certificate) d["certificate"] = certificate_dict(*c.certificate);
        return d;
      },
      py::arg("grid_rows"), py::arg("grid_cols"), py::arg("coeffs"), py::arg("tol") = 1e-8, py::arg("seed") = 0);

  m.def(
      "analyze_clinging",
      [](const std::vector<Mat>& coeffs, int levels, int samples, std::uint64_t seed) {
        const LinearPencil l(Grid{static_cast<int>(coeffs.size()), 1}, coeffs);
        const auto r = matrix_clinging_sample(l, levels, samples, seed);
        py::dict d;
        d["psd"] = r.psd;
        d["clings_scalar"] = r.clings_scalar;
        d["t"] = r.t;
        d["m"] = r.m;
        d["verdict"] = to_string(r.verdict);
        d["max_sample"] = r.max_sample;
        return d;
      },
      py::arg("coeffs"), py::arg("levels") = 3, py::arg("samples") = 200, py::arg("seed") = 0,
      "Pencil Σ A_j x_j on a g×1 grid.");

  m.def(
      "canonical_form",
      [](const std::string& series_json, double tol, std::uint64_t seed) {
        return analysis_dict(canonical_form_general(series_from_json(parse(series_json)), tol, seed));
      },
      py::arg("series_json"), py::arg("tol") = 1e-8, py::arg("seed") = 0);

  m.def(
      "cofactor_solve",
      [](const std::string& p_json, const std::string& q_json, int variables, int max_degree, bool exact,
         std::uint64_t seed) {
        const PolyMatrix p = pack_poly_matrix(poly_matrix_from_json(parse(p_json), variables), variables);
        const PolyMatrix q = pack_poly_matrix(poly_matrix_from_json(parse(q_json), variables), variables);
        const auto r = cofactor_solve(p, q, max_degree, exact ? SolveMode::exact : SolveMode::floating, seed);
        py::dict d;
        d["success"] = r.success;
        d["exact_verified"] = r.exact_verified;
        d["degree_used"] = r.degree_used;
        d["residual"] = r.residual;
        d["has_counterexample"] = r.counterexample.has_value();
        if (r.success) d["g"] = poly_matrix_to_json(unpack_poly_matrix(r.g)).dump();
        return d;
      },
      py::arg("p_json"), py::arg("q_json"), py::arg("variables"), py::arg("max_degree") = 4, py::arg("exact") = true,
      py::arg("seed") = 0);

  m.def(
      "run_suite",
      [](std::uint64_t seed, const std::vector<std::string>& filters) {
        SuiteConfig config;
        config.seed = seed;
        config.filters = filters;
        return suite_report_json(run_suite(config)).dump();
      },
      py::arg("seed") = 42, py::arg("filters") = std::vector<std::string>{}, "Self-check suite report as JSON text.");
}
