#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "famed/rational_matrix.hpp"

namespace famed {

struct ParseError : std::runtime_error {
  std::string code;  // UnpairedFace | OrderViolation | MalformedInput
  ParseError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct UnknownEdge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Target of one face gluing; tet < 0 marks an unglued face.
struct FaceGluing {
  int tet = -1;
  int face = -1;
  bool glued() const { return tet >= 0; }
};

/// Signed corner-cut counts of a normal curve on the cusp torus, one
/// (z, z', z'') triple per tetrahedron.
struct PeripheralCurve {
  std::vector<std::array<long, 3>> counts;
  PeripheralCurve() = default;
  explicit PeripheralCurve(int n) : counts(size_t(n), {0, 0, 0}) {}
  int size() const { return int(counts.size()); }
  PeripheralCurve negated() const {
    PeripheralCurve r(*this);
    for (auto& c : r.counts)
      for (auto& v : c) v = -v;
    return r;
  }
};

/// Shape structure in radians: (a_k, b_k, c_k) per tetrahedron, each in
/// (0, pi) with a+b+c = pi.
struct AngleStructure {
  std::vector<std::array<double, 3>> angles;
  int size() const { return int(angles.size()); }
};

/// The same in exact arithmetic, angles stored in units of pi.
struct RationalAngleStructure {
  std::vector<std::array<Rational, 3>> angles;
  int size() const { return int(angles.size()); }
  AngleStructure to_radians() const {
    AngleStructure a;
    a.angles.resize(angles.size());
    for (size_t k = 0; k < angles.size(); ++k)
      for (int j = 0; j < 3; ++j) a.angles[k][j] = angles[k][j].to_double() * std::numbers::pi;
    return a;
  }
};

// Tetrahedral edges in lexicographic vertex order.
inline constexpr std::array<std::array<int, 2>, 6> kEdgeVerts = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline int edge_index(int u, int v) {
  if (u > v) std::swap(u, v);
  for (int e = 0; e < 6; ++e)
    if (kEdgeVerts[e][0] == u && kEdgeVerts[e][1] == v) return e;
  throw std::logic_error("edge_index: bad vertex pair");
}

/// Shape slot (0 = z, 1 = z', 2 = z'') carried by a tetrahedral edge.
/// z sits on 01/23; for a positive tetrahedron z' sits on the c-edges 03/12
/// and z'' on the b-edges 02/13, and the two swap for a negative one.
inline int shape_slot(int edge_idx, int sign) {
  static constexpr int pos[6] = {0, 2, 1, 1, 2, 0};
  static constexpr int neg[6] = {0, 1, 2, 2, 1, 0};
  return sign > 0 ? pos[edge_idx] : neg[edge_idx];
}

/// Angle slot (0 = a, 1 = b, 2 = c) of a tetrahedral edge, sign-independent.
inline int angle_slot(int edge_idx) {
  static constexpr int slot[6] = {0, 1, 2, 2, 1, 0};
  return slot[edge_idx];
}

/// Angle slot paired with a shape slot in a tetrahedron of the given sign.
inline int angle_slot_of_shape(int shape, int sign) {
  if (shape == 0) return 0;                    // z <-> a
  if (sign > 0) return shape == 1 ? 2 : 1;     // z' <-> c, z'' <-> b
  return shape == 1 ? 1 : 2;                   // z' <-> b, z'' <-> c
}

struct EdgeIncidence {
  // (tet, edge_idx) pairs glued into this 1-cell
  std::vector<std::pair<int, int>> incidences;
};

struct OrderedTriangulation {
  int N = 0;
  std::string name;
  std::vector<std::array<FaceGluing, 4>> gluings;
  std::vector<int> sign;  // epsilon, +1/-1, normalized so the first tet is +1

  // Edge classes in canonical order (by smallest (tet, edge_idx) incidence).
  std::vector<EdgeIncidence> edges;
  std::vector<std::array<int, 6>> edge_class_of;  // [tet][edge_idx]

  // Face classes in canonical order (by smallest (tet, face) incidence).
  std::vector<std::array<int, 4>> face_class_of;  // [tet][face]
  int num_faces = 0;

  int num_vertices = 0;

  PeripheralCurve meridian, longitude;

  int num_edges() const { return int(edges.size()); }
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

/// Vertices of the face opposite vertex k, in increasing order.
inline std::array<int, 3> face_verts(int k) {
  std::array<int, 3> v{};
  int j = 0;
  for (int u = 0; u < 4; ++u)
    if (u != k) v[j++] = u;
  return v;
}

/// The order-respecting gluing of face k onto face m matches the i-th
/// smallest remaining vertex to the i-th smallest one.
inline std::array<int, 4> vertex_map(int k, int m) {
  std::array<int, 4> map{};
  map.fill(-1);
  const auto src = face_verts(k), dst = face_verts(m);
  for (int i = 0; i < 3; ++i) map[src[i]] = dst[i];
  return map;
}

}  // namespace detail

inline PeripheralCurve parse_curve(const nlohmann::json& j, int n, const char* which) {
  PeripheralCurve c(n);
  for (const char* key : {"c", "cp", "cpp"}) {
    if (!j.contains(key) || !j[key].is_array() || int(j[key].size()) != n)
      throw ParseError("MalformedInput",
                       std::string(which) + "." + key + " must be an integer array of length N");
  }
  for (int k = 0; k < n; ++k) {
    c.counts[k][0] = j["c"][k].get<long>();
    c.counts[k][1] = j["cp"][k].get<long>();
    c.counts[k][2] = j["cpp"][k].get<long>();
  }
  return c;
}

/// Builds the derived combinatorics (signs, edge/face/vertex classes) and
/// enforces the knot-complement invariants.
inline void finalize_triangulation(OrderedTriangulation& t) {
  const int n = t.N;
  // Involution sanity.
  for (int j = 0; j < n; ++j)
    for (int f = 0; f < 4; ++f) {
      const FaceGluing& g = t.gluings[j][f];
      if (!g.glued()) throw ParseError("UnpairedFace", "tetrahedron " + std::to_string(j) +
                                                           " face " + std::to_string(f) +
                                                           " is not glued");
      if (g.tet >= n || g.face < 0 || g.face > 3)
        throw ParseError("MalformedInput", "gluing target out of range");
      if (g.tet == j && g.face == f)
        throw ParseError("MalformedInput", "face glued to itself");
      const FaceGluing& back = t.gluings[g.tet][g.face];
      if (back.tet != j || back.face != f)
        throw ParseError("MalformedInput", "gluings are not an involution");
    }
  // Tetrahedron signs. An order-respecting gluing of face k onto face m is
  // orientation-compatible exactly when eps(T) * eps(T') = -(-1)^{k+m};
  // inconsistency means the vertex placement rule cannot be satisfied.
  const bool given = !t.sign.empty();
  if (given && int(t.sign.size()) != n)
    throw ParseError("MalformedInput", "signs must have one entry per tetrahedron");
  std::vector<int> inferred(n, 0);
  std::vector<int> stack;
  inferred[0] = given ? t.sign[0] : 1;
  stack.push_back(0);
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    for (int f = 0; f < 4; ++f) {
      const FaceGluing& g = t.gluings[j][f];
      const int req = -(((f + g.face) % 2 == 0) ? 1 : -1) * inferred[j];
      if (inferred[g.tet] == 0) {
        inferred[g.tet] = req;
        stack.push_back(g.tet);
      } else if (inferred[g.tet] != req) {
        throw ParseError("OrderViolation", "no consistent tetrahedron signs exist");
      }
    }
  }
  for (int j = 0; j < n; ++j)
    if (inferred[j] == 0)
      throw ParseError("MalformedInput", "triangulation is not connected");
  if (given && t.sign != inferred)
    throw ParseError("OrderViolation", "supplied signs violate the vertex placement rule");
  t.sign = inferred;

  // Face classes.
  detail::UnionFind fuf(4 * n);
  for (int j = 0; j < n; ++j)
    for (int f = 0; f < 4; ++f) fuf.unite(4 * j + f, 4 * t.gluings[j][f].tet + t.gluings[j][f].face);
  std::vector<int> face_label(4 * n, -1);
  t.num_faces = 0;
  t.face_class_of.assign(n, {});
  for (int idx = 0; idx < 4 * n; ++idx) {
    const int root = fuf.find(idx);
    if (face_label[root] < 0) face_label[root] = t.num_faces++;
    t.face_class_of[idx / 4][idx % 4] = face_label[root];
  }
  if (t.num_faces != 2 * n)
    throw ParseError("MalformedInput", "face pairing does not yield 2N face classes");

  // Edge classes: face k of T glued to face m of T' maps edge {u,v} of T to
  // {phi(u), phi(v)} of T' under the increasing vertex match.
  detail::UnionFind euf(6 * n);
  detail::UnionFind vuf(4 * n);
  for (int j = 0; j < n; ++j)
    for (int f = 0; f < 4; ++f) {
      const FaceGluing& g = t.gluings[j][f];
      const auto map = detail::vertex_map(f, g.face);
      const auto fv = detail::face_verts(f);
      for (int a = 0; a < 3; ++a) {
        vuf.unite(4 * j + fv[a], 4 * g.tet + map[fv[a]]);
        for (int b = a + 1; b < 3; ++b)
          euf.unite(6 * j + edge_index(fv[a], fv[b]),
                    6 * g.tet + edge_index(map[fv[a]], map[fv[b]]));
      }
    }
  std::vector<int> edge_label(6 * n, -1);
  t.edges.clear();
  t.edge_class_of.assign(n, {});
  for (int idx = 0; idx < 6 * n; ++idx) {
    const int root = euf.find(idx);
    if (edge_label[root] < 0) {
      edge_label[root] = int(t.edges.size());
      t.edges.emplace_back();
    }
    const int cls = edge_label[root];
    t.edge_class_of[idx / 6][idx % 6] = cls;
    t.edges[cls].incidences.emplace_back(idx / 6, idx % 6);
  }
  t.num_vertices = 0;
  std::vector<int> vseen(4 * n, 0);
  for (int idx = 0; idx < 4 * n; ++idx)
    if (!vseen[vuf.find(idx)]) {
      vseen[vuf.find(idx)] = 1;
      ++t.num_vertices;
    }
  if (t.num_vertices != 1 || t.num_edges() != n)
    throw ParseError("MalformedInput",
                     "not a one-cusp knot-complement triangulation (|X^0| = " +
                         std::to_string(t.num_vertices) + ", |X^1| = " +
                         std::to_string(t.num_edges()) + ")");
}

inline OrderedTriangulation parse_triangulation(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("MalformedInput", e.what());
  }
  OrderedTriangulation t;
  try {
    if (!j.contains("num_tetrahedra") || !j["num_tetrahedra"].is_number_integer())
      throw ParseError("MalformedInput", "missing num_tetrahedra");
    t.N = j["num_tetrahedra"].get<int>();
    if (t.N <= 0) throw ParseError("MalformedInput", "num_tetrahedra must be positive");
    t.name = j.value("name", std::string{});
    if (!j.contains("gluings") || int(j["gluings"].size()) != t.N)
      throw ParseError("MalformedInput", "gluings must be an array of N entries");
    t.gluings.assign(t.N, {});
    for (int k = 0; k < t.N; ++k) {
      const auto& row = j["gluings"][k];
      if (!row.is_array() || row.size() != 4)
        throw ParseError("MalformedInput", "each gluing entry needs 4 faces");
      for (int f = 0; f < 4; ++f) {
        const auto& cell = row[f];
        if (cell.is_null()) continue;  // unglued, caught below
        t.gluings[k][f].tet = cell.value("tet", -1);
        t.gluings[k][f].face = cell.value("face", -1);
      }
    }
    if (j.contains("signs")) {
      if (!j["signs"].is_array() || int(j["signs"].size()) != t.N)
        throw ParseError("MalformedInput", "signs must be an array of N entries");
      for (const auto& s : j["signs"]) {
        const int v = s.get<int>();
        if (v != 1 && v != -1) throw ParseError("MalformedInput", "signs entries must be +-1");
        t.sign.push_back(v);
      }
    }
    if (!j.contains("peripheral"))
      throw ParseError("MalformedInput", "missing peripheral curves");
    t.meridian = parse_curve(j["peripheral"]["meridian"], t.N, "meridian");
    t.longitude = parse_curve(j["peripheral"]["longitude"], t.N, "longitude");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("MalformedInput", e.what());
  }
  finalize_triangulation(t);
  return t;
}

inline nlohmann::ordered_json serialize_triangulation(const OrderedTriangulation& t) {
  nlohmann::ordered_json j;
  if (!t.name.empty()) j["name"] = t.name;
  j["num_tetrahedra"] = t.N;
  auto rows = nlohmann::ordered_json::array();
  for (int k = 0; k < t.N; ++k) {
    auto row = nlohmann::ordered_json::array();
    for (int f = 0; f < 4; ++f)
      row.push_back({{"tet", t.gluings[k][f].tet}, {"face", t.gluings[k][f].face}});
    rows.push_back(row);
  }
  j["gluings"] = rows;
  j["signs"] = t.sign;
  auto curve = [&](const PeripheralCurve& c) {
    nlohmann::ordered_json o;
    for (int s = 0; s < 3; ++s) {
      auto arr = nlohmann::ordered_json::array();
      for (int k = 0; k < t.N; ++k) arr.push_back(c.counts[k][s]);
      o[s == 0 ? "c" : (s == 1 ? "cp" : "cpp")] = arr;
    }
    return o;
  };
  j["peripheral"] = {{"meridian", curve(t.meridian)}, {"longitude", curve(t.longitude)}};
  return j;
}

/// Incidence counts E, E', E'' of shapes z, z', z'' around each edge class,
/// as exact (num_edges x N) matrices.
struct EdgeShapeCounts {
  RationalMatrix E, Ep, Epp;
};

inline EdgeShapeCounts classify_edges(const OrderedTriangulation& t) {
  EdgeShapeCounts c{RationalMatrix(t.num_edges(), t.N), RationalMatrix(t.num_edges(), t.N),
                    RationalMatrix(t.num_edges(), t.N)};
  for (int e = 0; e < t.num_edges(); ++e)
    for (const auto& [tet, eidx] : t.edges[e].incidences) {
      RationalMatrix& m = shape_slot(eidx, t.sign[tet]) == 0
                              ? c.E
                              : (shape_slot(eidx, t.sign[tet]) == 1 ? c.Ep : c.Epp);
      m(e, tet) += Rational(1);
    }
  return c;
}

/// Weight of an edge class under an angle structure (radians).
inline double weight_function(const OrderedTriangulation& t, const AngleStructure& alpha, int e) {
  if (e < 0 || e >= t.num_edges()) throw UnknownEdge("edge class out of range");
  double w = 0;
  for (const auto& [tet, eidx] : t.edges[e].incidences) w += alpha.angles[tet][angle_slot(eidx)];
  return w;
}

/// Same in units of pi, exactly.
inline Rational weight_function_exact(const OrderedTriangulation& t,
                                      const RationalAngleStructure& alpha, int e) {
  if (e < 0 || e >= t.num_edges()) throw UnknownEdge("edge class out of range");
  Rational w;
  for (const auto& [tet, eidx] : t.edges[e].incidences) w += alpha.angles[tet][angle_slot(eidx)];
  return w;
}

/// Angular holonomy of a normal curve: the signed sum of cut-off angles,
/// with each shape-slot count paired to its angle by the sign rule.
inline double angular_holonomy(const OrderedTriangulation& t, const AngleStructure& alpha,
                               const PeripheralCurve& sigma) {
  double h = 0;
  for (int k = 0; k < t.N; ++k)
    for (int s = 0; s < 3; ++s)
      h += double(sigma.counts[k][s]) * alpha.angles[k][angle_slot_of_shape(s, t.sign[k])];
  return h;
}

inline Rational angular_holonomy_exact(const OrderedTriangulation& t,
                                       const RationalAngleStructure& alpha,
                                       const PeripheralCurve& sigma) {
  Rational h;
  for (int k = 0; k < t.N; ++k)
    for (int s = 0; s < 3; ++s)
      h += Rational(sigma.counts[k][s]) * alpha.angles[k][angle_slot_of_shape(s, t.sign[k])];
  return h;
}

/// Renumbers tetrahedra by perm (new index of old tet k is perm[k]),
/// carrying gluings, curves and nothing else; derived data is rebuilt.
inline OrderedTriangulation permute_tetrahedra(const OrderedTriangulation& t,
                                               const std::vector<int>& perm) {
  OrderedTriangulation r;
  r.N = t.N;
  r.name = t.name;
  r.gluings.assign(t.N, {});
  r.sign.assign(t.N, 0);
  for (int k = 0; k < t.N; ++k)
    for (int f = 0; f < 4; ++f)
      r.gluings[perm[k]][f] = FaceGluing{perm[t.gluings[k][f].tet], t.gluings[k][f].face};
  r.meridian = PeripheralCurve(t.N);
  r.longitude = PeripheralCurve(t.N);
  for (int k = 0; k < t.N; ++k) {
    r.sign[perm[k]] = t.sign[k];
    r.meridian.counts[perm[k]] = t.meridian.counts[k];
    r.longitude.counts[perm[k]] = t.longitude.counts[k];
  }
  finalize_triangulation(r);
  return r;
}

}  // namespace famed
