// ncball: command-line front end.
// Exit codes: 0 success, 1 mathematical rejection, 2 usage or input error.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>

#include "ncball/ballmap.hpp"
#include "ncball/clinging.hpp"
#include "ncball/fock.hpp"
#include "ncball/io.hpp"
#include "ncball/linalg.hpp"
#include "ncball/nullss.hpp"
#include "ncball/random.hpp"
#include "ncball/suite.hpp"

using namespace ncball;
using ojson = nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  double tol = 1e-8;
  std::string out;
  std::string format = "json";
};

struct Outcome {
  ojson report;
  bool ok = true;
  std::string text;  // extra human-readable lines for --format text
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

ojson oj(const json& j) { return ojson::parse(j.dump()); }

bool is_matrix(const ojson& j) {
  return j.is_object() && j.size() == 3 && j.contains("rows") && j.contains("cols") && j.contains("data");
}

void text_lines(const ojson& j, const std::string& prefix, std::ostream& os) {
  if (is_matrix(j)) {
    const Mat m = mat_from_json(json::parse(j.dump()));
    os << prefix << ": " << m.rows() << "x" << m.cols() << "\n";
    for (Index r = 0; r < m.rows(); ++r) {
      os << " ";
      for (Index c = 0; c < m.cols(); ++c) os << " " << format_complex(m(r, c));
      os << "\n";
    }
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) text_lines(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_array() && (j.empty() || !j.front().is_structured())) {
    os << prefix << ": " << j.dump() << "\n";
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) text_lines(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else {
    os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

void emit(const Globals& g, const Outcome& o) {
  std::ostringstream os;
  if (g.format == "text") {
    if (!o.text.empty()) os << o.text;
    else text_lines(o.report, "", os);
  } else {
    os << o.report.dump(2) << "\n";
  }
  if (g.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(g.out);
    if (!f) throw Error("cannot write " + g.out);
    f << os.str();
  }
}

Grid parse_grid(const std::string& s) {
  int r = 0, c = 0;
  char sep = 0;
  std::istringstream is(s);
  if (!(is >> r >> sep >> c) || (sep != ',' && sep != 'x') || r < 1 || c < 1) {
    throw Error("grid must look like 2,1");
  }
  return {r, c};
}

NCPolynomial load_poly(const std::string& text, const std::string& file, const std::string& coeffs, Grid grid) {
  if (text.empty() == file.empty()) throw Error("give exactly one of --poly and --file");
  const std::string src = text.empty() ? read_text(file) : text;
  if (coeffs.empty()) return parse_poly(src, grid);
  const CoeffTable table = coeff_table_from_json(read_json_file(coeffs));
  return parse_poly(src, grid, &table);
}

ojson verdict_json(const BallVerdict& v) {
  return {{"status", to_string(v.status)}, {"norm", v.norm}, {"tolerance", v.tolerance}};
}

ojson cert_json(const CompleteIsometryCertificate& c) {
  ojson f = ojson::array(), h = ojson::array();
  for (const auto& v : c.f_vectors) f.push_back(oj(to_json(Mat(v))));
  for (const auto& v : c.h_vectors) h.push_back(oj(to_json(Mat(v))));
  ojson phi = c.phi.coeffs().empty() || c.phi.shape().rows == 0 || c.phi.shape().cols == 0 ? ojson(nullptr)
                                                                                           : oj(to_json(c.phi));
  return {{"u", oj(to_json(c.u))},
          {"v", oj(to_json(c.v))},
          {"phi", phi},
          {"f_vectors", f},
          {"h_vectors", h},
          {"fs_residual", c.fs_residual},
          {"h_independence", c.h_independence},
          {"off_diagonal", c.off_diagonal},
          {"residual", c.residual},
          {"trials", c.trials}};
}

ojson analysis_json(const BallMapAnalysis& a) {
  ojson j{{"accepted", a.accepted}, {"stage", a.stage}, {"message", a.message}};
  j["via_moebius"] = a.via_moebius;
  if (a.via_moebius) {
    j["basepoint"] = oj(to_json(a.basepoint));
    j["round_trip_residual"] = a.round_trip_residual;
  }
  j["linear_part"] = oj(to_json(a.linear_part));
  j["certificate"] = a.cert ? cert_json(*a.cert) : ojson(nullptr);
  j["tilde_shape"] = {a.tilde_shape.rows, a.tilde_shape.cols};
  j["tilde_h"] = a.tilde_h ? oj(to_json(*a.tilde_h)) : ojson(nullptr);
  if (a.violation) {
    j["violation"] = {{"degree", a.violation->alpha}, {"block", a.violation->block}, {"norm", a.violation->norm}};
  } else {
    j["violation"] = nullptr;
  }
  j["max_offdiag"] = a.max_offdiag;
  j["reconstruction_residual"] = a.reconstruction_residual;
  j["fock_checked"] = a.fock_checked;
  j["fock_consistent"] = a.fock_consistent;
  return j;
}

ojson failure_json(const std::optional<SampleFailure>& f) {
  if (!f) return nullptr;
  return {{"sample", f->sample}, {"value", f->value}, {"point", oj(to_json(f->point))}};
}

ojson kernel_json(const BindingKernel& k) {
  ojson alphas = ojson::array(), vs = ojson::array();
  for (const auto& a : k.alphas) alphas.push_back(oj(to_json(Mat(a))));
  for (const auto& v : k.vs) vs.push_back(oj(to_json(Mat(v))));
  return {{"t", k.t},
          {"m", k.m},
          {"alphas", alphas},
          {"vs", vs},
          {"gamma", oj(to_json(k.gamma))},
          {"kernel_residual", k.kernel_residual},
          {"exact_path", k.exact_path},
          {"heuristic", k.heuristic}};
}

ojson counterexample_json(const std::optional<KernelCounterexample>& c) {
  if (!c) return nullptr;
  return {{"point", oj(to_json(c->point))}, {"vector", oj(to_json(Mat(c->vector)))}, {"q_norm", c->q_norm}};
}

int infer_variables(const json& j) {
  int vars = 1;
  const std::regex letter("x([0-9]+)");
  std::function<void(const json&)> walk = [&](const json& e) {
    if (e.is_array()) {
      for (const auto& x : e) walk(x);
    } else if (e.is_string()) {
      const std::string s = e.get<std::string>();
      for (auto it = std::sregex_iterator(s.begin(), s.end(), letter); it != std::sregex_iterator(); ++it) {
        vars = std::max(vars, std::stoi((*it)[1]));
      }
    }
  };
  walk(j);
  return vars;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noncommutative ball maps: evaluation, certificates and self-checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--tol", g.tol, "Tolerance")->capture_default_str();
  app.add_option("--out", g.out, "Write the report to this file");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();

  std::function<Outcome()> action;

  // parse
  std::string poly_text, poly_file, coeff_file, grid_text = "1,1";
  auto* parse = app.add_subcommand("parse", "Parse a polynomial and print its canonical form");
  parse->add_option("--poly", poly_text, "Polynomial text");
  parse->add_option("--file", poly_file, "File holding polynomial text");
  parse->add_option("--coeffs", coeff_file, "JSON table of named coefficient matrices");
  parse->add_option("--grid", grid_text, "Variable grid g',g")->capture_default_str();
  parse->callback([&] {
    action = [&] {
      const NCPolynomial p = load_poly(poly_text, poly_file, coeff_file, parse_grid(grid_text));
      ojson j{{"grid", {p.grid().rows, p.grid().cols}},
              {"shape", {p.shape().rows, p.shape().cols}},
              {"degree", p.degree()},
              {"terms", p.terms().size()}};
      if (p.shape() == Shape{1, 1}) {
        j["canonical"] = print_poly(p);
      } else {
        CoeffTable names;
        j["canonical"] = print_poly(p, names);
        ojson table = ojson::object();
        for (const auto& [n, m] : names) table[n] = oj(to_json(m));
        j["coeffs"] = table;
      }
      return Outcome{j};
    };
  });

  // eval
  std::string point_file;
  auto* eval = app.add_subcommand("eval", "Evaluate a polynomial at a matrix tuple");
  eval->add_option("--poly", poly_text, "Polynomial text");
  eval->add_option("--file", poly_file, "File holding polynomial text");
  eval->add_option("--coeffs", coeff_file, "JSON table of named coefficient matrices");
  eval->add_option("--point", point_file, "Tuple JSON")->required();
  eval->callback([&] {
    action = [&] {
      const MatrixTuple x = tuple_from_json(read_json_file(point_file));
      const NCPolynomial p = load_poly(poly_text, poly_file, coeff_file, x.grid());
      const Mat v = eval_poly(p, x);
      return Outcome{{{"level", x.level()}, {"value", oj(to_json(v))}, {"norm", linalg::op_norm(v)}}};
    };
  });

  // ball
  auto* ball = app.add_subcommand("ball", "Matrix ball membership");
  ball->require_subcommand(1);
  auto* classify = ball->add_subcommand("classify", "Classify a tuple as interior, boundary or outside");
  classify->add_option("--point", point_file, "Tuple JSON")->required();
  classify->callback([&] {
    action = [&] {
      const auto v = classify_ball(tuple_from_json(read_json_file(point_file)), g.tol);
      return Outcome{verdict_json(v), v.status != BallStatus::outside};
    };
  });

  // pencil
  std::string pencil_file;
  auto* pencil = app.add_subcommand("pencil", "Pencil balls");
  pencil->require_subcommand(1);
  auto* member = pencil->add_subcommand("member", "Membership of a tuple in a pencil ball");
  auto* embed = pencil->add_subcommand("embed", "Corner embedding check against pencil membership");
  for (auto* sc : {member, embed}) {
    sc->add_option("--pencil", pencil_file, "Pencil JSON")->required();
    sc->add_option("--point", point_file, "Tuple JSON")->required();
  }
  member->callback([&] {
    action = [&] {
      const LinearPencil l = pencil_from_json(read_json_file(pencil_file));
      const MatrixTuple x = tuple_from_json(read_json_file(point_file));
      const auto v = pencil_ball_membership(l, x, g.tol);
      ojson j = verdict_json(v);
      j["value"] = oj(to_json(pencil_eval(l, x)));
      return Outcome{j, v.status != BallStatus::outside};
    };
  });
  embed->callback([&] {
    action = [&] {
      const LinearPencil l = pencil_from_json(read_json_file(pencil_file));
      const auto r = lmi_embed_check(l, tuple_from_json(read_json_file(point_file)), g.tol);
      return Outcome{{{"lmi_status", to_string(r.lmi_status)}, {"ball_status", to_string(r.ball_status)}, {"agree", r.agree}},
                     r.agree};
    };
  });

  // moebius
  std::string v_file, u_file;
  int samples = 100;
  auto* moebius = app.add_subcommand("moebius", "Matrix ball automorphisms");
  moebius->require_subcommand(1);
  auto* mapply = moebius->add_subcommand("apply", "Apply F_v to U");
  mapply->add_option("--v", v_file, "Matrix JSON with ‖v‖ < 1")->required();
  mapply->add_option("--u", u_file, "Matrix JSON, d'n × dn")->required();
  mapply->callback([&] {
    action = [&] {
      const MoebiusParams p(mat_from_json(read_json_file(v_file)));
      const Mat u = mat_from_json(read_json_file(u_file));
      const auto r = moebius_apply(p, u);
      return Outcome{{{"value", oj(to_json(r.value))},
                      {"norm", linalg::op_norm(r.value)},
                      {"condition", r.condition},
                      {"ill_conditioned", r.ill_conditioned}}};
    };
  });
  auto* mverify = moebius->add_subcommand("verify", "Seeded preservation and involution checks");
  mverify->add_option("--samples", samples, "Number of (v, U) pairs")->capture_default_str();
  mverify->callback([&] {
    action = [&] {
      Rng rng(derive_seed(g.seed, "moebius.verify"));
      double worst_norm = 0.0, worst_boundary = 0.0, worst_inv = 0.0;
      int rank_failures = 0;
      for (int t = 0; t < samples; ++t) {
        const Index n = 1 + t % 3;
        const MoebiusParams p(random_with_norm(2, 2, uniform(rng, 0.0, 0.9), rng));
        const bool boundary = t % 2 == 0;
        const Mat u = random_with_norm(2 * n, 2 * n, boundary ? 1.0 : uniform(rng), rng);
        const Mat fu = moebius_apply(p, u).value;
        worst_norm = std::max(worst_norm, linalg::op_norm(fu));
        if (boundary) worst_boundary = std::max(worst_boundary, std::abs(linalg::op_norm(fu) - 1.0));
        worst_inv = std::max(worst_inv, verify_involution(p, u).residual);
        if (!verify_rank_preservation(p, u).pass) ++rank_failures;
      }
      const bool ok = worst_norm <= 1.0 + 1e-10 && worst_boundary <= 1e-8 && worst_inv <= 1e-9 && rank_failures == 0;
      return Outcome{{{"samples", samples},
                      {"pass", ok},
                      {"max_image_norm", worst_norm},
                      {"max_boundary_defect", worst_boundary},
                      {"max_involution_residual", worst_inv},
                      {"rank_failures", rank_failures}},
                     ok};
    };
  });

  // fock
  int gprime = 2, gcols = 2, n = 3, max_n = 3;
  auto* fock = app.add_subcommand("fock", "Truncated Fock space model");
  fock->require_subcommand(1);
  auto* fid = fock->add_subcommand("identities", "Exact identities of the compressed shift tuple");
  fid->add_option("--gprime", gprime)->capture_default_str();
  fid->add_option("--g", gcols)->capture_default_str();
  fid->add_option("--n", n)->capture_default_str();
  fid->callback([&] {
    action = [&] {
      const auto r = check_bigX_identities(build_bigX(gprime, gcols, n));
      return Outcome{{{"level", r.level},
                      {"star_product", r.star_product},
                      {"product_star", r.product_star},
                      {"star_product_mismatches", r.star_product_mismatches},
                      {"product_star_mismatches", r.product_star_mismatches},
                      {"nilpotent", r.nilpotent},
                      {"pass", r.pass()}},
                     r.pass()};
    };
  });
  auto* funique = fock->add_subcommand("unique", "Look for a positivity witness that p is nonzero");
  funique->add_option("--poly", poly_text, "Polynomial text");
  funique->add_option("--file", poly_file, "File holding polynomial text");
  funique->add_option("--coeffs", coeff_file, "JSON table of named coefficient matrices");
  funique->add_option("--grid", grid_text, "Variable grid g',g")->capture_default_str();
  funique->add_option("--N", max_n, "Largest truncation level")->capture_default_str();
  funique->callback([&] {
    action = [&] {
      const NCPolynomial p = load_poly(poly_text, poly_file, coeff_file, parse_grid(grid_text));
      const auto v = unique_s_polynomial_test(p, max_n);
      ojson w = nullptr;
      if (v.witness) {
        w = {{"n", v.witness->n},
             {"part", v.witness->part},
             {"min_eigenvalue", v.witness->min_eigenvalue},
             {"vector", oj(to_json(Mat(v.witness->vector)))}};
      }
      // A witness shows p ≠ 0, which is the expected outcome for nonzero input.
      return Outcome{{{"consistent_with_zero", v.consistent_with_zero},
                      {"min_eigenvalues", v.min_eigenvalues},
                      {"witness", w}},
                     !v.consistent_with_zero || p.is_zero()};
    };
  });

  // iso
  std::string map_file;
  auto* iso = app.add_subcommand("iso", "Complete isometries");
  iso->require_subcommand(1);
  auto* certify = iso->add_subcommand("certify", "Certify a linear map as a complete isometry");
  certify->add_option("--map", map_file, "Pencil JSON holding A_jl = ψ(E_jl)")->required();
  certify->callback([&] {
    action = [&] {
      const LinearMatrixMap psi = pencil_from_json(read_json_file(map_file));
      const auto c = certify_complete_isometry(psi, g.tol, g.seed);
      const auto bt = block_transpose_test(psi);
      const auto cc = sample_complete_contractivity(psi, 20, g.seed);
      ojson j{{"accepted", c.accepted},
              {"inconclusive", c.inconclusive},
              {"stage", c.stage},
              {"message", c.message},
              {"residual", c.residual},
              {"block_transpose_norm", bt.norm},
              {"sampled_max_ratio", cc.max_ratio},
              {"sampled_argmax", oj(to_json(cc.argmax))}};
      if (c.certificate) {
        j["certificate"] = cert_json(*c.certificate);
        const auto chk = verify_certificate(psi, *c.certificate, g.seed);
        j["check"] = {{"residual", chk.residual},
                      {"unitarity", chk.unitarity},
                      {"phi_max_ratio", chk.phi_max_ratio},
                      {"phi_plausibly_cc", chk.phi_plausibly_cc}};
      }
      return Outcome{j, c.accepted};
    };
  });

  // cling
  int levels = 4, budget = 1000, max_d = 3, max_level = 3;
  auto* cling = app.add_subcommand("cling", "Distinguished isometries and clinging");
  cling->require_subcommand(1);
  auto* analyze = cling->add_subcommand("analyze", "Gram positivity, scalar and matrix clinging");
  analyze->add_option("--pencil", pencil_file, "Pencil JSON on a g×1 grid")->required();
  analyze->add_option("--levels", levels)->capture_default_str();
  analyze->add_option("--samples", samples)->capture_default_str();
  analyze->callback([&] {
    action = [&] {
      const LinearPencil l = pencil_from_json(read_json_file(pencil_file));
      const GramMatrix gm = gram_of_delta(l);
      const auto psd = delta_psd(gm);
      ojson j{{"gram", oj(to_json(gm.g_mat))}, {"psd", psd.psd}, {"gram_min_eigenvalue", psd.min_eigenvalue}};
      if (!psd.psd) {
        j["witness"] = psd.witness ? oj(to_json(*psd.witness)) : ojson(nullptr);
        j["witness_value"] = psd.witness_value;
        return Outcome{j, false};
      }
      const auto sc = clinging_scalar(gm, g.seed);
      j["clings_scalar"] = sc.clings;
      j["kernel"] = kernel_json(sc.kernel);
      if (sc.failing_direction) j["failing_direction"] = oj(to_json(Mat(*sc.failing_direction)));
      j["orthotropic"] = orthotropic_check(l).pass;
      if (!sc.clings) return Outcome{j, false};
      const auto r = matrix_clinging_sample(l, levels, samples, g.seed);
      j["applies_9_4"] = r.applies_9_4;
      j["verdict"] = to_string(r.verdict);
      j["max_sampled_min_eigenvalue"] = r.max_sample;
      j["heuristic_kernel"] = r.heuristic_kernel;
      j["refuting_point"] = r.refuting_point ? oj(to_json(*r.refuting_point)) : ojson(nullptr);
      return Outcome{j, r.verdict != ClingVerdict::refuted && r.verdict != ClingVerdict::unknown};
    };
  });
  auto* search3 = cling->add_subcommand("search3", "Seeded search for a three-variable non-clinging pencil");
  search3->add_option("--budget", budget)->capture_default_str();
  search3->add_option("--max-d", max_d)->capture_default_str();
  search3->add_option("--max-level", max_level)->capture_default_str();
  search3->callback([&] {
    action = [&] {
      const auto r = three_var_search(budget, g.seed, max_d, max_level);
      ojson cands = ojson::array();
      for (const auto& c : r.candidates) {
        cands.push_back({{"index", c.index},
                         {"pencil", oj(to_json(c.pencil))},
                         {"point", oj(to_json(c.point))},
                         {"margin", c.margin},
                         {"t", c.t},
                         {"m", c.m}});
      }
      return Outcome{{{"constructed", r.constructed},
                      {"passed_filters", r.passed_filters},
                      {"theorem_covered", r.theorem_covered},
                      {"candidates", cands}}};
    };
  });

  // ballmap
  std::string series_file;
  bool truncated = false;
  auto* ballmap = app.add_subcommand("ballmap", "Ball maps given as truncated series");
  ballmap->require_subcommand(1);
  auto* canon = ballmap->add_subcommand("canon", "Canonical form V diag(x, h̃(x)) U*");
  canon->add_option("--series", series_file, "Series JSON (.ncs)")->required();
  canon->callback([&] {
    action = [&] {
      const TruncatedSeries h = series_from_json(read_json_file(series_file));
      const auto a = canonical_form_general(h, g.tol, g.seed);
      return Outcome{analysis_json(a), a.accepted};
    };
  });
  auto* schwarz = ballmap->add_subcommand("schwarz", "Sampled Schwarz inequality");
  schwarz->add_option("--series", series_file, "Series JSON (.ncs)")->required();
  schwarz->add_option("--levels", levels)->capture_default_str();
  schwarz->add_option("--samples", samples)->capture_default_str();
  schwarz->add_flag("--truncated", truncated, "Widen tolerances by the tail estimate");
  schwarz->callback([&] {
    action = [&] {
      SuiteOptions opts;
      opts.levels = levels;
      opts.samples = samples;
      opts.seed = g.seed;
      opts.truncated = truncated;
      const auto r = schwarz_suite(series_from_json(read_json_file(series_file)), opts);
      return Outcome{{{"pass", r.pass},
                      {"samples", r.samples},
                      {"min_eigenvalue", r.min_eigenvalue},
                      {"max_norm", r.max_norm},
                      {"max_tail", r.max_tail},
                      {"first_failure", failure_json(r.first_failure)}},
                     r.pass};
    };
  });
  auto* bidisk = ballmap->add_subcommand("bidisk", "Decomposition through the isometric subspace");
  bidisk->add_option("--series", series_file, "Series JSON (.ncs)")->required();
  bidisk->add_option("--levels", levels)->capture_default_str();
  bidisk->add_option("--samples", samples)->capture_default_str();
  bidisk->callback([&] {
    action = [&] {
      const TruncatedSeries h = series_from_json(read_json_file(series_file));
      const auto d = bidisk_decompose(h, 1e-10, std::min(levels, 3), std::min(samples, 50), g.seed);
      ojson parts = ojson::array();
      for (std::size_t a = 0; a < d.p_parts.size(); ++a) {
        parts.push_back(oj(to_json(TruncatedSeries::from_polynomial(d.p_parts[a]))));
      }
      return Outcome{{{"pass", d.pass},
                      {"isometric_dim", d.s.cols()},
                      {"m", oj(to_json(d.m))},
                      {"s", oj(to_json(d.s))},
                      {"factor_residuals", d.factor_residuals},
                      {"failed_degree", d.failed_alpha},
                      {"isometry_defect", d.isometry_defect},
                      {"perp_contraction", d.perp_contraction},
                      {"orth_linear", d.orth_linear},
                      {"orth_parts", d.orth_parts},
                      {"max_perp_norm", d.max_perp_norm},
                      {"parts", parts}},
                     d.pass};
    };
  });

  // nullss
  std::string p_file, q_file, mode = "exact";
  int max_degree = 6, vars = 0;
  auto* nullss = app.add_subcommand("nullss", "Left Nullstellensatz cofactors");
  nullss->require_subcommand(1);
  auto* solve = nullss->add_subcommand("solve", "Find G with Q = G P");
  solve->add_option("--p", p_file, "Polynomial matrix JSON (.ncpm)")->required();
  solve->add_option("--q", q_file, "Polynomial matrix JSON (.ncpm)")->required();
  solve->add_option("--max-degree", max_degree)->capture_default_str();
  solve->add_option("--mode", mode)->check(CLI::IsMember({"exact", "floating"}))->capture_default_str();
  solve->add_option("--vars", vars, "Number of variables (default: largest index used)");
  solve->callback([&] {
    action = [&] {
      const json pj = read_json_file(p_file), qj = read_json_file(q_file);
      const int v = vars > 0 ? vars : std::max(infer_variables(pj), infer_variables(qj));
      const PolyMatrix p = pack_poly_matrix(poly_matrix_from_json(pj, v), v);
      const PolyMatrix q = pack_poly_matrix(poly_matrix_from_json(qj, v), v);
      const auto r = cofactor_solve(p, q, max_degree, solve_mode_from_string(mode), g.seed);
      ojson j{{"success", r.success}, {"mode", to_string(r.mode)}, {"variables", v}};
      j["cofactor"] = r.success ? oj(poly_matrix_to_json(unpack_poly_matrix(r.g))) : ojson(nullptr);
      j["degree_used"] = r.degree_used;
      j["residual"] = r.residual;
      j["exact_verified"] = r.exact_verified;
      j["max_degree"] = r.max_degree;
      j["min_residual"] = r.min_residual;
      j["budget_exhausted"] = r.budget_exhausted;
      j["counterexample"] = counterexample_json(r.counterexample);
      j["message"] = r.message;
      return Outcome{j, r.success};
    };
  });

  // suite
  SuiteConfig config;
  std::vector<std::string> faults;
  bool list = false;
  auto* suite = app.add_subcommand("suite", "Run every module's self-checks");
  suite->add_option("--filter", config.filters, "Run only checks whose name contains this text");
  suite->add_option("--inject-fault", faults, "Corrupt the input of the named check");
  suite->add_flag("--list", list, "List check names");
  suite->callback([&] {
    action = [&] {
      if (list) {
        ojson names = suite_check_names();
        std::string text;
        for (const auto& s : suite_check_names()) text += s + "\n";
        return Outcome{names, true, text};
      }
      config.seed = g.seed;
      config.inject_faults = {faults.begin(), faults.end()};
      const auto report = run_suite(config);
      std::ostringstream text;
      double total = 0.0;
      for (const auto& c : report.checks) {
        text << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << std::fixed << std::setprecision(1) << c.runtime_ms << " ms)\n";
        total += c.runtime_ms;
      }
      text << (report.pass() ? "all checks passed" : "some checks failed") << " in " << std::fixed << std::setprecision(1) << total << " ms\n";
      if (g.format == "json") std::cerr << text.str();
      return Outcome{suite_report_json(report), report.pass(), text.str()};
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    const Outcome o = action();
    emit(g, o);
    return o.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
