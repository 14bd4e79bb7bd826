#include "doctest.h"

#include <fstream>
#include <numbers>
#include <sstream>

#include "famed/triangulation.hpp"
#include "support/cusp_curves.hpp"

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

AngleStructure all_angles(double a, double b, double c, int n) {
  AngleStructure s;
  s.angles.assign(n, {a, b, c});
  return s;
}

}  // namespace

TEST_SUITE("triangulation") {

TEST_CASE("fig8 parses with the printed combinatorics") {
  OrderedTriangulation t = fig8();
  CHECK(t.N == 2);
  CHECK(t.sign[0] == 1);
  CHECK(t.sign[1] == -1);
  CHECK(t.num_faces == 4);
  CHECK(t.num_edges() == 2);
  CHECK(t.num_vertices == 1);
}

TEST_CASE("unpaired face is rejected") {
  try {
    parse_triangulation(read_file("one_tet_unpaired.json"));
    FAIL("expected UnpairedFace");
  } catch (const ParseError& e) {
    CHECK(e.code == "UnpairedFace");
  }
}

TEST_CASE("malformed inputs are rejected") {
  CHECK_THROWS_AS(parse_triangulation("{"), ParseError);
  CHECK_THROWS_AS(parse_triangulation("{\"num_tetrahedra\": 0}"), ParseError);
  // broken involution
  const char* bad = R"({
    "num_tetrahedra": 2,
    "gluings": [
      [{"tet":1,"face":2},{"tet":1,"face":3},{"tet":1,"face":0},{"tet":1,"face":1}],
      [{"tet":0,"face":2},{"tet":0,"face":3},{"tet":0,"face":1},{"tet":0,"face":0}]],
    "peripheral": {"meridian": {"c":[0,0],"cp":[0,0],"cpp":[0,0]},
                    "longitude": {"c":[0,0],"cp":[0,0],"cpp":[0,0]}}})";
  try {
    parse_triangulation(bad);
    FAIL("expected MalformedInput");
  } catch (const ParseError& e) {
    CHECK(e.code == "MalformedInput");
  }
}

TEST_CASE("supplied signs violating the placement rule are rejected") {
  std::string text = read_file("fig8.json");
  auto j = nlohmann::json::parse(text);
  j["signs"] = {1, 1};
  try {
    parse_triangulation(j.dump());
    FAIL("expected OrderViolation");
  } catch (const ParseError& e) {
    CHECK(e.code == "OrderViolation");
  }
}

TEST_CASE("serialize / parse round-trip is the identity on canonical form") {
  OrderedTriangulation t = fig8();
  const std::string text = serialize_triangulation(t).dump();
  OrderedTriangulation t2 = parse_triangulation(text);
  CHECK(serialize_triangulation(t2) == serialize_triangulation(t));
  CHECK(t2.sign == t.sign);
  CHECK(t2.edge_class_of == t.edge_class_of);
}

TEST_CASE("permuted file gives an isomorphic triangulation with the same sign multiset") {
  OrderedTriangulation t = fig8();
  OrderedTriangulation p = parse_triangulation(read_file("fig8_permuted.json"));
  int plus_t = 0, plus_p = 0;
  for (int s : t.sign) plus_t += s > 0;
  for (int s : p.sign) plus_p += s > 0;
  CHECK(plus_t == plus_p);
  CHECK(p.num_edges() == t.num_edges());
  CHECK(p.num_faces == t.num_faces);
  // permute_tetrahedra on the original reproduces the permuted fixture
  OrderedTriangulation q = permute_tetrahedra(t, {1, 0});
  CHECK(serialize_triangulation(q)["gluings"] == serialize_triangulation(p)["gluings"]);
  CHECK(q.sign == p.sign);
}

TEST_CASE("each face class has exactly two preimages under the face maps") {
  OrderedTriangulation t = fig8();
  std::vector<int> hits(t.num_faces, 0);
  for (int j = 0; j < t.N; ++j)
    for (int f = 0; f < 4; ++f) ++hits[t.face_class_of[j][f]];
  for (int h : hits) CHECK(h == 2);
}

TEST_CASE("edge incidence counts match the hand walk of the fixture") {
  OrderedTriangulation t = fig8();
  EdgeShapeCounts c = classify_edges(t);
  // first edge class: 2 z-edges and one z'-edge in the positive tetrahedron,
  // two z'-edges and one z''-edge in the negative one
  CHECK(c.E(0, 0) == Rational(2));
  CHECK(c.Ep(0, 0) == Rational(1));
  CHECK(c.Epp(0, 0) == Rational(0));
  CHECK(c.E(0, 1) == Rational(0));
  CHECK(c.Ep(0, 1) == Rational(2));
  CHECK(c.Epp(0, 1) == Rational(1));
  // total count is 6N, and the complementary row is 6 minus the first
  Rational total;
  for (int e = 0; e < 2; ++e)
    for (int j = 0; j < 2; ++j) total += c.E(e, j) + c.Ep(e, j) + c.Epp(e, j);
  CHECK(total == Rational(12));
  for (int j = 0; j < 2; ++j)
    CHECK(c.E(1, j) + c.Ep(1, j) + c.Epp(1, j) ==
          Rational(6) - (c.E(0, j) + c.Ep(0, j) + c.Epp(0, j)));
}

TEST_CASE("weight function reproduces 2a+ + c+ + 2b- + c- on the first edge") {
  OrderedTriangulation t = fig8();
  RationalAngleStructure probe;
  probe.angles = {{Rational(2), Rational(3), Rational(5)},
                  {Rational(7), Rational(11), Rational(13)}};
  // 2 a0 + c0 + 2 b1 + c1 = 4 + 5 + 22 + 13
  CHECK(weight_function_exact(t, probe, 0) == Rational(44));
  CHECK(weight_function_exact(t, probe, 1) ==
        Rational(2 * 3 + 5 + 2 * 7 + 13));  // 2b+ + c+ + 2a- + c-
  CHECK_THROWS_AS(weight_function(t, all_angles(1, 1, 1, 2), 7), UnknownEdge);
}

TEST_CASE("equilateral angles give weight 2 pi on both edges") {
  OrderedTriangulation t = fig8();
  const AngleStructure a =
      all_angles(std::numbers::pi / 3, std::numbers::pi / 3, std::numbers::pi / 3, 2);
  CHECK(weight_function(t, a, 0) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-14));
  CHECK(weight_function(t, a, 1) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("angular holonomy is linear and vanishes for the zero curve") {
  OrderedTriangulation t = fig8();
  PeripheralCurve zero(2);
  CHECK(angular_holonomy(t, all_angles(0.3, 1.1, std::numbers::pi - 1.4, 2), zero) == 0.0);
  // meridian and longitude of the complete structure have zero angular holonomy
  const AngleStructure geo =
      all_angles(std::numbers::pi / 3, std::numbers::pi / 3, std::numbers::pi / 3, 2);
  CHECK(angular_holonomy(t, geo, t.meridian) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(angular_holonomy(t, geo, t.longitude) == doctest::Approx(0.0).epsilon(1e-14));
  // linearity
  AngleStructure a1 = all_angles(0.9, 1.1, std::numbers::pi - 2.0, 2);
  AngleStructure a2 = all_angles(1.2, 0.7, std::numbers::pi - 1.9, 2);
  AngleStructure sum = a1;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j) sum.angles[k][j] += a2.angles[k][j];
  CHECK(angular_holonomy(t, sum, t.meridian) ==
        doctest::Approx(angular_holonomy(t, a1, t.meridian) +
                        angular_holonomy(t, a2, t.meridian)));
}

TEST_CASE("cusp walker: vertex loops reproduce the edge incidence rows") {
  OrderedTriangulation t = fig8();
  testsupport::CuspWalker walker(t);
  EdgeShapeCounts counts = classify_edges(t);
  for (int e = 0; e < t.num_edges(); ++e) {
    auto [tet, eidx] = t.edges[e].incidences[0];
    PeripheralCurve loop = walker.vertex_loop(tet, kEdgeVerts[eidx][0], kEdgeVerts[eidx][1]);
    for (int j = 0; j < t.N; ++j) {
      CHECK(Rational(loop.counts[j][0]) == counts.E(e, j));
      CHECK(Rational(loop.counts[j][1]) == counts.Ep(e, j));
      CHECK(Rational(loop.counts[j][2]) == counts.Epp(e, j));
    }
  }
}

TEST_CASE("cusp walker: the bundled peripheral curves are realized normal curves") {
  OrderedTriangulation t = fig8();
  testsupport::CuspWalker walker(t);
  auto curves = walker.enumerate_curves(10);
  auto found = [&](const PeripheralCurve& c) {
    for (const auto& cand : curves)
      if (cand.counts == c.counts) return true;
    return false;
  };
  CHECK(found(t.meridian));
  CHECK(found(t.longitude));
}

}  // TEST_SUITE
