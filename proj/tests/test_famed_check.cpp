#include "doctest.h"

#include <fstream>
#include <sstream>

#include "famed/famed_check.hpp"
#include "famed/json_io.hpp"

using namespace famed;

namespace {

std::string read_file(const std::string& name) {
  std::ifstream in(std::string(FAMED_DATA_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OrderedTriangulation fig8() { return parse_triangulation(read_file("fig8.json")); }

}  // namespace

TEST_SUITE("famed_check") {

TEST_CASE("simplex: basic feasible problem") {
  // min -x1 s.t. x1 + x2 = 1
  RationalMatrix a(1, 2);
  a(0, 0) = Rational(1);
  a(0, 1) = Rational(1);
  auto r = RationalSimplex::solve(a, {Rational(1)}, {Rational(-1), Rational(0)});
  REQUIRE(r.status == RationalSimplex::Status::Optimal);
  CHECK(r.x[0] == Rational(1));
  CHECK(r.objective == Rational(-1));
}

TEST_CASE("simplex: infeasible problem yields a Farkas certificate") {
  // x1 = 1 and x1 = 2 simultaneously
  RationalMatrix a(2, 1);
  a(0, 0) = Rational(1);
  a(1, 0) = Rational(1);
  std::vector<Rational> b{Rational(1), Rational(2)};
  auto r = RationalSimplex::solve(a, b, {Rational(0)});
  REQUIRE(r.status == RationalSimplex::Status::Infeasible);
  // verify y.A <= 0 and y.b > 0 exactly
  Rational ya;
  for (int i = 0; i < 2; ++i) ya += r.farkas[i] * a(i, 0);
  CHECK(ya.sign() <= 0);
  Rational yb;
  for (int i = 0; i < 2; ++i) yb += r.farkas[i] * b[i];
  CHECK(yb.sign() > 0);
}

TEST_CASE("angle polytope of fig8: the equilateral point maximizes the minimum angle") {
  AngleFeasibility f = angle_polytope_feasible(fig8());
  REQUIRE(f.feasible);
  CHECK(f.min_angle == Rational(1, 3));
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j) CHECK(f.alpha.angles[k][j] == Rational(1, 3));
  // exact edge weights
  OrderedTriangulation t = fig8();
  for (int e = 0; e < t.num_edges(); ++e)
    CHECK(weight_function_exact(t, f.alpha, e) == Rational(2));
}

TEST_CASE("angle feasibility verdict is invariant under renumbering") {
  OrderedTriangulation t = fig8();
  OrderedTriangulation q = permute_tetrahedra(t, {1, 0});
  AngleFeasibility f1 = angle_polytope_feasible(t);
  AngleFeasibility f2 = angle_polytope_feasible(q);
  CHECK(f1.feasible == f2.feasible);
  CHECK(f1.min_angle == f2.min_angle);
}

TEST_CASE("a real triangulation with a valence-1 edge has no angle structures") {
  OrderedTriangulation t = parse_triangulation(read_file("valence_one.json"));
  int min_valence = 1000;
  for (const auto& e : t.edges) min_valence = std::min(min_valence, int(e.incidences.size()));
  REQUIRE(min_valence == 1);
  AngleFeasibility f = angle_polytope_feasible(t);
  CHECK_FALSE(f.feasible);
  CHECK(f.closed_polytope_empty);
  CHECK_FALSE(f.farkas.empty());
  // the whole certificate reports not-FAMED without throwing
  FamedCertificate cert = check_def_1_7(t);
  CHECK_FALSE(cert.clause1_angles);
  CHECK_FALSE(cert.famed_l());
}

TEST_CASE("a valence-1 edge weight row is infeasible, with certificate") {
  // synthetic weight system: one tetrahedron, one edge of valence 1 asks a
  // single angle-hat to reach 2 while the tet row caps it at 1
  RationalMatrix a(2, 4);  // variables (t, s_a, s_b, s_c)
  a(0, 0) = Rational(3);
  for (int j = 1; j < 4; ++j) a(0, j) = Rational(1);
  a(1, 0) = Rational(1);
  a(1, 1) = Rational(1);
  std::vector<Rational> b{Rational(1), Rational(2)};
  auto r = RationalSimplex::solve(a, b, {Rational(-1), Rational(0), Rational(0), Rational(0)});
  REQUIRE(r.status == RationalSimplex::Status::Infeasible);
  Rational yb;
  for (int i = 0; i < 2; ++i) yb += r.farkas[i] * b[i];
  CHECK(yb.sign() > 0);
}

TEST_CASE("fig8 satisfies the first definition with n = 0") {
  FamedCertificate cert = check_def_1_3(fig8());
  CHECK(cert.clause1_angles);
  CHECK(cert.clause2_nullity);
  CHECK(cert.clause3_delta);  // vacuous, empty matrices
  CHECK(cert.clause4_stack);
  CHECK(cert.famed_l());
  CHECK(cert.nullity_A == 0);
  CHECK(cert.nullity_B == 0);
  // with n = 0 clause 4 is equivalent to the exact test B^{-1} A = G
  OrderedTriangulation t = fig8();
  NzPair p = build_nz_pair(build_gluing_matrices(t, t.longitude));
  auto w = rref_with_witness(p.B);
  CHECK(w.elem * p.A == cert.kernel.G);
}

TEST_CASE("clause-3 row equivalence is symmetric in its arguments") {
  FamedCertificate cert = check_def_1_3(fig8());
  // same-shape empty matrices compare both ways
  CHECK(row_equivalent(cert.nz.EA_bot, cert.kernel.delta_block));
  CHECK(row_equivalent(cert.kernel.delta_block, cert.nz.EA_bot));
}

TEST_CASE("fig8 satisfies the second definition; C = (1, -1) and k = 0") {
  FamedCertificate cert = check_def_1_7(fig8());
  CHECK(cert.famed_lm());
  CHECK(cert.clause17_2_lastcol);  // vacuous at n = 0
  REQUIRE(cert.cvec.size() == 2);
  CHECK(cert.cvec[0] == Rational(1));
  CHECK(cert.cvec[1] == Rational(-1));
  CHECK(cert.meridian.match);
  CHECK(cert.meridian.k == Rational(0));
  CHECK_FALSE(cert.meridian_flipped);
}

TEST_CASE("C-vector is -2 times the last column of E'") {
  FamedCertificate cert = check_def_1_7(fig8());
  for (size_t i = 0; i < cert.cvec.size(); ++i)
    CHECK(cert.cvec[i] == Rational(-2) * cert.nz.Eprime_top(int(i), 1));
}

TEST_CASE("meridian replaced by the longitude-shifted curve fails 1.7(3) only") {
  OrderedTriangulation t = parse_triangulation(read_file("fig8_skew_meridian.json"));
  FamedCertificate cert = check_def_1_7(t);
  CHECK(cert.famed_l());
  CHECK(cert.symplectic.generator_pair);
  CHECK(cert.clause17_2_lastcol);
  CHECK_FALSE(cert.clause17_3_meridian);
  CHECK_FALSE(cert.famed_lm());
  CHECK_FALSE(cert.meridian.residual_row.empty());
}

TEST_CASE("trivial meridian with zero C-vector matches with k = 0") {
  OrderedTriangulation t = fig8();
  NzPair p = build_nz_pair(build_gluing_matrices(t, t.longitude));
  PeripheralCurve zero(2);
  MeridianMatch m = meridian_holonomy_match({Rational(0), Rational(0)}, {0, 1}, p, zero,
                                            p.nu_over_pi);
  CHECK(m.match);
  CHECK(m.k == Rational(0));
}

TEST_CASE("meridian orientation flip is applied when the pairing is +2") {
  OrderedTriangulation t = fig8();
  t.meridian = t.meridian.negated();
  FamedCertificate cert = check_def_1_7(t);
  CHECK(cert.meridian_flipped);
  CHECK(cert.famed_lm());
  CHECK(cert.symplectic.meridian_longitude == Rational(-2));
}

TEST_CASE("synthetic nonzero last column fails 1.7(2)") {
  // stand-alone check of the clause logic on a fabricated bottom block
  RationalMatrix e_bot = RationalMatrix::from_long({{0, 0, 1}, {0, 0, 0}});
  bool all_zero = true;
  const int last = e_bot.cols() - 1;
  for (int i = 0; i < e_bot.rows(); ++i)
    if (!e_bot(i, last).is_zero()) all_zero = false;
  CHECK_FALSE(all_zero);
}

TEST_CASE("all verdicts are invariant under tetrahedron renumbering") {
  OrderedTriangulation t = fig8();
  FamedCertificate c1 = check_def_1_7(t);
  FamedCertificate c2 = check_def_1_7(permute_tetrahedra(t, {1, 0}));
  CHECK(c1.famed_l() == c2.famed_l());
  CHECK(c1.famed_lm() == c2.famed_lm());
  CHECK(c1.clause1_angles == c2.clause1_angles);
  CHECK(c1.clause2_nullity == c2.clause2_nullity);
  CHECK(c1.clause3_delta == c2.clause3_delta);
  CHECK(c1.clause4_stack == c2.clause4_stack);
  CHECK(c1.clause17_2_lastcol == c2.clause17_2_lastcol);
  CHECK(c1.clause17_3_meridian == c2.clause17_3_meridian);
}

TEST_CASE("certificates re-verify from stored witnesses") {
  OrderedTriangulation t = fig8();
  FamedCertificate cert = check_def_1_7(t);
  CHECK(verify_certificate(cert, t));
  OrderedTriangulation skew = parse_triangulation(read_file("fig8_skew_meridian.json"));
  CHECK(verify_certificate(check_def_1_7(skew), skew));
}

}  // TEST_SUITE
