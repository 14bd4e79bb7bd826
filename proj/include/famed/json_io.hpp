#pragma once

#include <complex>
#include <string>

#include "json.hpp"

#include "famed/famed_check.hpp"
#include "famed/geometry.hpp"
#include "famed/rational_matrix.hpp"

namespace famed {

using ordered_json = nlohmann::ordered_json;

inline ordered_json matrix_to_json(const RationalMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(row);
  }
  return ordered_json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", rows}};
}

inline ordered_json complex_to_json(const cplx& z) {
  return ordered_json::array({z.real(), z.imag()});
}

inline ordered_json angles_to_json(const RationalAngleStructure& a) {
  ordered_json out = ordered_json::array();
  for (const auto& t : a.angles)
    out.push_back(ordered_json::array({t[0].str(), t[1].str(), t[2].str()}));
  return out;
}

inline ordered_json certificate_to_json(const FamedCertificate& cert) {
  ordered_json j;
  j["famed_l"] = cert.famed_l();
  j["famed_lm"] = cert.famed_lm();
  j["clauses"] = {{"angle_structures_nonempty", cert.clause1_angles},
                  {"nullity_pair", cert.clause2_nullity},
                  {"delta_block_row_equivalent", cert.clause3_delta},
                  {"stacked_row_equivalent", cert.clause4_stack},
                  {"last_column_zero", cert.clause17_2_lastcol},
                  {"meridian_representative", cert.clause17_3_meridian}};
  j["nullity"] = {{"face_matrix", cert.nullity_A}, {"nz_B", cert.nullity_B}};
  if (!cert.failure_reason.empty()) j["failure_reason"] = cert.failure_reason;
  if (cert.angles.feasible) {
    j["angle_structure_units_pi"] = angles_to_json(cert.angles.alpha);
    j["min_angle_units_pi"] = cert.angles.min_angle.str();
  } else if (cert.angles.closed_polytope_empty) {
    ordered_json farkas = ordered_json::array();
    for (const auto& y : cert.angles.farkas) farkas.push_back(y.str());
    j["angle_infeasibility_certificate"] = farkas;
  }
  ordered_json pivots = ordered_json::array();
  for (int p : cert.nz.pivots) pivots.push_back(p);
  j["pivots"] = pivots;
  j["E"] = matrix_to_json(cert.nz.E);
  if (cert.nz.has_eprime) j["E_prime_top"] = matrix_to_json(cert.nz.Eprime_top);
  j["G_script"] = matrix_to_json(cert.kernel.G);
  j["Q"] = matrix_to_json(cert.kernel.Q);
  if (!cert.cvec.empty()) {
    ordered_json cv = ordered_json::array();
    for (const auto& c : cert.cvec) cv.push_back(c.str());
    j["C_vector"] = cv;
  }
  j["meridian_flipped"] = cert.meridian_flipped;
  if (cert.meridian.match) {
    j["meridian_match"] = {{"k", cert.meridian.k.str()}};
    ordered_json combo = ordered_json::array();
    for (const auto& l : cert.meridian.edge_combo) combo.push_back(l.str());
    j["meridian_match"]["edge_combination"] = combo;
  } else if (!cert.meridian.residual_row.empty()) {
    ordered_json res = ordered_json::array();
    for (const auto& r : cert.meridian.residual_row) res.push_back(r.str());
    j["meridian_residual_row"] = res;
  }
  j["symplectic"] = {{"edge_pairings_zero", cert.symplectic.edge_pairings_zero},
                     {"meridian_edges_zero", cert.symplectic.meridian_edges_zero},
                     {"meridian_longitude_pairing", cert.symplectic.meridian_longitude.str()},
                     {"generator_pair", cert.symplectic.generator_pair}};
  return j;
}

inline ordered_json shapes_to_json(const ShapeAssignment& s) {
  ordered_json zs = ordered_json::array(), ys = ordered_json::array();
  for (int k = 0; k < s.size(); ++k) {
    zs.push_back(complex_to_json(s.z(k)));
    ys.push_back(complex_to_json(s.y[k]));
  }
  return ordered_json{{"z", zs}, {"y", ys}};
}

/// Exact re-verification of the stored witnesses; no search is re-run.
inline bool verify_certificate(const FamedCertificate& cert, const OrderedTriangulation& t) {
  // angle structure satisfies its constraints exactly
  if (cert.angles.feasible) {
    const auto& a = cert.angles.alpha;
    for (int k = 0; k < t.N; ++k) {
      Rational s = a.angles[k][0] + a.angles[k][1] + a.angles[k][2];
      if (s != Rational(1)) return false;
      for (int j = 0; j < 3; ++j)
        if (a.angles[k][j].sign() <= 0 || a.angles[k][j] >= Rational(1)) return false;
    }
    for (int e = 0; e < t.num_edges(); ++e)
      if (weight_function_exact(t, a, e) != Rational(2)) return false;
  }
  // kernel witness multiplies back to the block identity
  const FaceMatrices fm = build_face_matrices(t);
  RationalMatrix prod = cert.kernel.w.elem1 * fm.A * cert.kernel.w.elem2;
  for (int i = 0; i < prod.rows(); ++i)
    for (int j = 0; j < prod.cols(); ++j) {
      const Rational want = (i == j && i < cert.kernel.r) ? Rational(1) : Rational(0);
      if (prod(i, j) != want) return false;
    }
  // E reduces (B|A) to the stored blocks
  const GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  const NzPair p = build_nz_pair(gm);
  const RationalMatrix red = cert.nz.E * RationalMatrix::hcat(p.B, p.A);
  const int top = t.N - cert.nz.two_n;
  if (red.block(0, 0, top, t.N) != cert.nz.EB_top) return false;
  if (!red.block(top, 0, cert.nz.two_n, t.N).is_zero()) return false;
  if (red.block(0, t.N, top, t.N) != cert.nz.EA_top) return false;
  if (red.block(top, t.N, cert.nz.two_n, t.N) != cert.nz.EA_bot) return false;
  // clause 4 witness: EA_top + Etilde EA_bot = EB_top G
  if (cert.clause4_stack && cert.nz.has_eprime) {
    if (cert.nz.EA_top + cert.nz.Etilde * cert.nz.EA_bot != cert.nz.EB_top * cert.kernel.G)
      return false;
  }
  // meridian combination reproduces the meridian row
  if (cert.meridian.match) {
    PeripheralCurve meridian = cert.meridian_flipped ? t.meridian.negated() : t.meridian;
    const CurveRow m = curve_row(meridian);
    std::vector<Rational> lhs(2 * t.N);
    for (int j = 0; j < t.N; ++j) {
      lhs[j] = m.a[j];
      lhs[t.N + j] = m.b[j];
    }
    for (size_t i = 0; i < cert.nz.pivots.size(); ++i) lhs[cert.nz.pivots[i]] -= cert.cvec[i];
    for (int i = 0; i + 1 < t.N; ++i)
      for (int j = 0; j < t.N; ++j) {
        lhs[j] -= cert.meridian.edge_combo[i] * p.A(i, j);
        lhs[t.N + j] -= cert.meridian.edge_combo[i] * p.B(i, j);
      }
    for (const auto& v : lhs)
      if (!v.is_zero()) return false;
  }
  return true;
}

}  // namespace famed
