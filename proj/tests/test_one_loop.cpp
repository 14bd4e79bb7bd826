#include "doctest.h"

#include <fstream>
#include <sstream>

#include "famed/one_loop.hpp"

using namespace famed;

namespace {

OrderedTriangulation fig8() {
  std::ifstream in(std::string(FAMED_DATA_DIR) + "/fig8.json");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_triangulation(ss.str());
}

NzPair pair_for(const OrderedTriangulation& t, const PeripheralCurve& c) {
  return build_nz_pair(build_gluing_matrices(t, c));
}

/// Other strong flattenings: shift by primitive integer kernel vectors of
/// the full constraint system.
std::vector<Flattening> strong_flattenings(const OrderedTriangulation& t,
                                           const GluingMatrices& gm, int want) {
  const int n = gm.N();
  RationalMatrix sys(2 * n + 1, 3 * n);
  for (int i = 0; i < n; ++i) {
    sys(i, i) = Rational(1);
    sys(i, n + i) = Rational(1);
    sys(i, 2 * n + i) = Rational(1);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      sys(n + i, j) = gm.G(i, j);
      sys(n + i, n + j) = gm.Gp(i, j);
      sys(n + i, 2 * n + j) = gm.Gpp(i, j);
    }
  for (int j = 0; j < n; ++j) {
    sys(2 * n, j) = Rational(t.meridian.counts[j][0]);
    sys(2 * n, n + j) = Rational(t.meridian.counts[j][1]);
    sys(2 * n, 2 * n + j) = Rational(t.meridian.counts[j][2]);
  }
  Flattening base = solve_strong_flattening(gm, t.meridian);
  std::vector<Flattening> out{base};
  auto kb = kernel_basis(sys);
  for (const auto& v : kb) {
    // clear denominators to land on the kernel lattice
    Integer den(1);
    for (const auto& q : v) den = Integer::lcm(den, q.den());
    Flattening shifted = base;
    for (int j = 0; j < n; ++j) {
      shifted.f[j] += (v[j] * Rational(den)).num();
      shifted.fp[j] += (v[n + j] * Rational(den)).num();
      shifted.fpp[j] += (v[2 * n + j] * Rational(den)).num();
    }
    if (verify_flattening(gm, t.meridian, shifted)) out.push_back(shifted);
    if (int(out.size()) >= want) break;
  }
  // double shifts if still short
  if (int(out.size()) < want && !kb.empty()) {
    Flattening shifted = base;
    Integer den(1);
    for (const auto& q : kb[0]) den = Integer::lcm(den, q.den());
    for (int j = 0; j < n; ++j) {
      shifted.f[j] += (kb[0][j] * Rational(den)).num() * Integer(2);
      shifted.fp[j] += (kb[0][n + j] * Rational(den)).num() * Integer(2);
      shifted.fpp[j] += (kb[0][2 * n + j] * Rational(den)).num() * Integer(2);
    }
    if (verify_flattening(gm, t.meridian, shifted)) out.push_back(shifted);
  }
  return out;
}

}  // namespace

TEST_SUITE("one_loop") {

TEST_CASE("|tau| does not depend on the strong flattening") {
  OrderedTriangulation t = fig8();
  GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  ConeStructure cs = solve_gluing(pair_for(t, t.longitude), 0.0);
  auto fls = strong_flattenings(t, gm, 3);
  REQUIRE(fls.size() >= 3);
  const double ref = std::abs(one_loop_invariant(cs.shapes, gm, fls[0]).tau);
  CHECK(ref > 0);
  for (const auto& fl : fls)
    CHECK(std::abs(one_loop_invariant(cs.shapes, gm, fl).tau) ==
          doctest::Approx(ref).epsilon(1e-11));
}

TEST_CASE("tau is nonzero along the continuation") {
  OrderedTriangulation t = fig8();
  GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  Flattening fl = solve_strong_flattening(gm, t.meridian);
  NzPair pm = pair_for(t, t.meridian);
  DeformationPath path = deform_path(pm, t.longitude, cplx(0.15, 0.0), 6);
  for (const auto& cs : path.samples)
    CHECK(std::abs(one_loop_invariant(cs.shapes, gm, fl).tau) > 1e-6);
}

TEST_CASE("conjugate shapes conjugate tau up to sign") {
  OrderedTriangulation t = fig8();
  GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  Flattening fl = solve_strong_flattening(gm, t.meridian);
  ConeStructure cs = solve_gluing(pair_for(t, t.longitude), 0.0);
  std::vector<cplx> conj_z;
  for (int k = 0; k < 2; ++k) conj_z.push_back(std::conj(cs.shapes.z(k)));
  ShapeAssignment conj_s = ShapeAssignment::from_shapes(conj_z);
  const cplx a = one_loop_invariant(cs.shapes, gm, fl).tau;
  const cplx b = one_loop_invariant(conj_s, gm, fl).tau;
  const double diff = std::min(std::abs(std::conj(a) - b), std::abs(std::conj(a) + b));
  CHECK(diff < 1e-10);
}

TEST_CASE("flattening that fails verification is a precondition violation") {
  OrderedTriangulation t = fig8();
  GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  Flattening fl = solve_strong_flattening(gm, t.meridian);
  fl.f[0] += Integer(1);
  CHECK_FALSE(verify_flattening(gm, t.meridian, fl));
}

TEST_CASE("degenerate inputs are rejected") {
  OrderedTriangulation t = fig8();
  GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  Flattening fl = solve_strong_flattening(gm, t.meridian);
  ShapeAssignment sing = ShapeAssignment::from_shapes({cplx(1.0, 1e-14), cplx(0.5, 0.8)});
  CHECK_THROWS_AS(one_loop_invariant(sing, gm, fl), SingularShape);
  DeformationPath empty_path;
  empty_path.t = {0.0};
  CHECK_THROWS_AS(change_of_curve_residual(empty_path, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("change of curve: |tau_m| = |dw_m/dw_l| |tau_l| at the complete structure") {
  OrderedTriangulation t = fig8();
  GluingMatrices gm_l = build_gluing_matrices(t, t.longitude);
  GluingMatrices gm_m = build_gluing_matrices(t, t.meridian);
  Flattening fl = solve_strong_flattening(gm_l, t.meridian);
  // a strong flattening verifies against both curve choices
  CHECK(verify_flattening(gm_m, t.longitude, fl));
  NzPair pm = pair_for(t, t.meridian);
  DeformationPath path = deform_path(pm, t.longitude, cplx(2e-3, 0.0), 2);
  const ShapeAssignment& shapes = path.samples.front().shapes;
  const cplx tau_l = one_loop_invariant(shapes, gm_l, fl).tau;
  const cplx tau_m = one_loop_invariant(shapes, gm_m, fl).tau;
  const double res = change_of_curve_residual(path, tau_l, tau_m);
  CHECK(res < 1e-5);
  // residual shrinks roughly quadratically with the step
  DeformationPath fine = deform_path(pm, t.longitude, cplx(5e-4, 0.0), 2);
  const double res_fine = change_of_curve_residual(fine, tau_l, tau_m);
  CHECK(res_fine < 0.3 * res + 1e-12);
}

TEST_CASE("the alternate determinant convention is computed and compared") {
  OrderedTriangulation t = fig8();
  GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  Flattening fl = solve_strong_flattening(gm, t.meridian);
  ConeStructure cs = solve_gluing(pair_for(t, t.longitude), 0.0);
  OneLoopValue a = one_loop_invariant(cs.shapes, gm, fl, OneLoopConvention::GppMinusGp);
  OneLoopValue b = one_loop_invariant(cs.shapes, gm, fl, OneLoopConvention::GppMinusG);
  CHECK(std::abs(a.tau) > 0);
  CHECK(std::abs(b.tau) > 0);
  // the two conventions are both exposed; their agreement is reported, not
  // assumed (they genuinely differ on this fixture)
  WARN_MESSAGE(std::abs(std::abs(a.tau) - std::abs(b.tau)) < 1e-9,
               "determinant conventions disagree at the modulus level");
}

}  // TEST_SUITE
