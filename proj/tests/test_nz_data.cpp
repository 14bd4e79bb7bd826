#include "doctest.h"

#include <fstream>
#include <sstream>

#include "famed/face_kernel.hpp"
#include "famed/nz_data.hpp"

using namespace famed;

namespace {

OrderedTriangulation fig8() {
  std::ifstream in(std::string(FAMED_DATA_DIR) + "/fig8.json");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_triangulation(ss.str());
}

}  // namespace

TEST_SUITE("nz_data") {

TEST_CASE("fig8 gluing matrices") {
  OrderedTriangulation t = fig8();
  GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  CHECK(gm.G == RationalMatrix::from_long({{2, 0}, {2, 0}}));
  CHECK(gm.Gp == RationalMatrix::from_long({{1, 2}, {0, 0}}));
  CHECK(gm.Gpp == RationalMatrix::from_long({{0, 1}, {-2, 0}}));
  // row sums of edge rows equal the edge valence
  Rational s;
  for (int j = 0; j < 2; ++j) s += gm.G(0, j) + gm.Gp(0, j) + gm.Gpp(0, j);
  CHECK(s == Rational(6));
  // zero longitude zeroes the last rows
  PeripheralCurve zero(2);
  GluingMatrices gz = build_gluing_matrices(t, zero);
  for (int j = 0; j < 2; ++j) {
    CHECK(gz.G(1, j).is_zero());
    CHECK(gz.Gp(1, j).is_zero());
    CHECK(gz.Gpp(1, j).is_zero());
  }
}

TEST_CASE("fig8 NZ pair and nu") {
  OrderedTriangulation t = fig8();
  NzPair p = build_nz_pair(build_gluing_matrices(t, t.longitude));
  CHECK(p.A == RationalMatrix::from_long({{1, -2}, {2, 0}}));
  CHECK(p.B == RationalMatrix::from_long({{-1, -1}, {-2, 0}}));
  CHECK(p.nu_over_pi[0] == Integer(-1));  // 2 - (1 + 2)
  CHECK(p.nu_over_pi[1] == Integer(0));   // longitude has no z' corners
}

TEST_CASE("nu formula for a zeroed G'") {
  // G' = 0 gives nu/pi = (2, ..., 2, 0)
  GluingMatrices gm{RationalMatrix::from_long({{2, 1}, {1, 0}}), RationalMatrix(2, 2),
                    RationalMatrix::from_long({{0, 1}, {0, 2}})};
  NzPair p = build_nz_pair(gm);
  CHECK(p.nu_over_pi[0] == Integer(2));
  CHECK(p.nu_over_pi[1] == Integer(0));
}

TEST_CASE("fig8 reduction: E = B^{-1}, pivots (0,1), E' = E") {
  OrderedTriangulation t = fig8();
  NzPair p = build_nz_pair(build_gluing_matrices(t, t.longitude));
  NzReduction r = reduce_nz(p);
  CHECK(r.two_n == 0);
  CHECK(r.pivots == std::vector<int>{0, 1});
  CHECK(r.E * p.B == RationalMatrix::identity(2));
  CHECK(r.has_eprime);
  CHECK(r.Eprime_top == r.E_top);
  CHECK(r.EB_top == RationalMatrix::identity(2));
  // det E = 1 / det B = -1/2
  CHECK(r.det_E == Rational(-1, 2));
}

TEST_CASE("identity B gives the trivial reduction") {
  NzPair p;
  p.B = RationalMatrix::identity(3);
  p.A = RationalMatrix::from_long({{1, 2, 3}, {0, 1, 0}, {5, -1, 2}});
  p.nu_over_pi = {Integer(0), Integer(0), Integer(0)};
  NzReduction r = reduce_nz(p);
  CHECK(r.two_n == 0);
  CHECK(r.E == RationalMatrix::identity(3));
  CHECK(r.EB_top == RationalMatrix::identity(3));
  CHECK(r.EA_top == p.A);
}

TEST_CASE("synthetic rank-deficient B: bottom block of EB is exactly zero") {
  NzPair p;
  p.B = RationalMatrix::from_long(
      {{1, 0, 1, 0}, {0, 1, 0, 1}, {1, 1, 1, 1}, {2, 1, 2, 1}});  // rank 2
  p.A = RationalMatrix::identity(4);
  p.nu_over_pi = {Integer(0), Integer(0), Integer(0), Integer(0)};
  NzReduction r = reduce_nz(p);
  CHECK(r.two_n == 2);
  CHECK(r.EB_top.rows() == 2);
  CHECK(rank_of(r.EA_bot) == 2);
  // reduction really is E * (B|A)
  RationalMatrix red = r.E * RationalMatrix::hcat(p.B, p.A);
  CHECK(red.block(2, 0, 2, 4).is_zero());
}

TEST_CASE("symplectic pairings of the fixture") {
  OrderedTriangulation t = fig8();
  NzPair p = build_nz_pair(build_gluing_matrices(t, t.longitude));
  SymplecticReport rep = symplectic_check(p, t.meridian, t.longitude);
  CHECK(rep.edge_pairings_zero);
  CHECK(rep.meridian_edges_zero);
  CHECK(rep.meridian_longitude == Rational(-2));
  CHECK(rep.generator_pair);
  CHECK(rep.orientation_convention);
}

TEST_CASE("meridian = longitude is not a generator pair") {
  OrderedTriangulation t = fig8();
  NzPair p = build_nz_pair(build_gluing_matrices(t, t.longitude));
  SymplecticReport rep = symplectic_check(p, t.longitude, t.longitude);
  CHECK(rep.meridian_longitude.is_zero());
  CHECK_FALSE(rep.generator_pair);
}

TEST_CASE("corrupted meridian counts raise SymplecticViolation") {
  OrderedTriangulation t = fig8();
  NzPair p = build_nz_pair(build_gluing_matrices(t, t.longitude));
  PeripheralCurve bad = t.meridian;
  bad.counts[0][0] += 1;
  CHECK_THROWS_AS(symplectic_check(p, bad, t.longitude), SymplecticViolation);
}

TEST_CASE("strong flattening exists and verifies; corruption fails") {
  OrderedTriangulation t = fig8();
  GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  Flattening fl = solve_strong_flattening(gm, t.meridian);
  CHECK(verify_flattening(gm, t.meridian, fl));
  for (int i = 0; i < 2; ++i)
    CHECK(fl.f[i] + fl.fp[i] + fl.fpp[i] == Integer(1));
  Flattening bad = fl;
  bad.f[0] += Integer(1);
  CHECK_FALSE(verify_flattening(gm, t.meridian, bad));
}

TEST_CASE("renumbering: pair invariants survive tetrahedron permutation") {
  OrderedTriangulation t = fig8();
  OrderedTriangulation q = permute_tetrahedra(t, {1, 0});
  NzPair p = build_nz_pair(build_gluing_matrices(t, t.longitude));
  NzPair pq = build_nz_pair(build_gluing_matrices(q, q.longitude));
  CHECK(rank_of(RationalMatrix::hcat(pq.A, pq.B)) == 2);
  CHECK(nullity_of(pq.B) == nullity_of(p.B));
  SymplecticReport rep = symplectic_check(pq, q.meridian, q.longitude);
  CHECK(rep.generator_pair);
}

TEST_CASE("dropped edge row is a combination of the kept rows on the fixture") {
  OrderedTriangulation t = fig8();
  EdgeShapeCounts c = classify_edges(t);
  // in (A|B) coordinates the two edge rows sum to zero
  for (int j = 0; j < 2; ++j) {
    CHECK((c.E(0, j) - c.Ep(0, j)) + (c.E(1, j) - c.Ep(1, j)) == Rational(0));
    CHECK((c.Epp(0, j) - c.Ep(0, j)) + (c.Epp(1, j) - c.Ep(1, j)) == Rational(0));
  }
}

}  // TEST_SUITE
