#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "famed/rational_matrix.hpp"
#include "famed/triangulation.hpp"

namespace famed {

struct DependentRowViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SymplecticViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoIntegerSolution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// N x N gluing matrices: the first N-1 rows carry the shape incidence
/// counts of the kept edge classes (the last edge class is dropped), the
/// last row the signed corner counts of the chosen curve.
struct GluingMatrices {
  RationalMatrix G, Gp, Gpp;
  int N() const { return G.rows(); }
};

/// Row of a peripheral curve in (Log z | Log z'') coordinates together with
/// the i*pi multiple it absorbs: H = a.Log z + b.Log z'' + i*pi*cp_sum.
struct CurveRow {
  std::vector<Rational> a, b;
  long cp_sum = 0;
};

inline CurveRow curve_row(const PeripheralCurve& c) {
  CurveRow r;
  const int n = c.size();
  r.a.resize(n);
  r.b.resize(n);
  for (int k = 0; k < n; ++k) {
    r.a[k] = Rational(c.counts[k][0] - c.counts[k][1]);
    r.b[k] = Rational(c.counts[k][2] - c.counts[k][1]);
    r.cp_sum += c.counts[k][1];
  }
  return r;
}

inline GluingMatrices build_gluing_matrices(const OrderedTriangulation& t,
                                            const PeripheralCurve& curve) {
  const int n = t.N;
  const EdgeShapeCounts counts = classify_edges(t);
  GluingMatrices gm{RationalMatrix(n, n), RationalMatrix(n, n), RationalMatrix(n, n)};
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j < n; ++j) {
      gm.G(i, j) = counts.E(i, j);
      gm.Gp(i, j) = counts.Ep(i, j);
      gm.Gpp(i, j) = counts.Epp(i, j);
    }
  for (int j = 0; j < n; ++j) {
    gm.G(n - 1, j) = Rational(curve.counts[j][0]);
    gm.Gp(n - 1, j) = Rational(curve.counts[j][1]);
    gm.Gpp(n - 1, j) = Rational(curve.counts[j][2]);
  }
  // The dropped edge row must be a rational combination of the kept ones;
  // in (A|B) coordinates the edge rows sum to zero, so it is equivalent to
  // the kept rows having full rank N-1 there.
  RationalMatrix kept(n - 1, 2 * n);
  RationalMatrix all_rows(n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      all_rows(i, j) = counts.E(i, j) - counts.Ep(i, j);
      all_rows(i, n + j) = counts.Epp(i, j) - counts.Ep(i, j);
    }
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j < 2 * n; ++j) kept(i, j) = all_rows(i, j);
  if (n > 1) {
    if (rank_of(kept) != n - 1)
      throw DependentRowViolation("kept edge rows are not independent");
    if (rank_of(all_rows) != n - 1)
      throw DependentRowViolation("dropped edge row is not dependent on the kept rows");
  }
  return gm;
}

/// A = G - G', B = G'' - G', and nu with A Log z + B Log z'' = i nu + u,
/// where nu/pi is integral: eliminating Log z' against
/// Log z + Log z' + Log z'' = i pi turns the 2 pi i edge targets into
/// pi (2 - sum G'_j) and the curve target xi into xi - i pi sum G'_N.
struct NzPair {
  RationalMatrix A, B;
  std::vector<Integer> nu_over_pi;
  int N() const { return A.rows(); }
};

inline NzPair build_nz_pair(const GluingMatrices& gm) {
  NzPair p;
  p.A = gm.G - gm.Gp;
  p.B = gm.Gpp - gm.Gp;
  const int n = gm.N();
  p.nu_over_pi.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rational s;
    for (int j = 0; j < n; ++j) s += gm.Gp(i, j);
    const Rational v = (i + 1 < n) ? Rational(2) - s : -s;
    if (!v.is_integer()) throw RankDeficient("nu is not an integer multiple of pi");
    p.nu_over_pi.push_back(v.num());
  }
  if (rank_of(RationalMatrix::hcat(p.A, p.B)) != n)
    throw RankDeficient("rank(A|B) < N: invalid peripheral data");
  return p;
}

/// E with (EB | EA) in reduced row echelon form, split into the N-2n rows
/// whose pivots land in the B block and the 2n rows below (whose B part is
/// exactly zero), plus the E-tilde corrected E'.
struct NzReduction {
  RationalMatrix E;        // N x N
  Rational det_E;
  int two_n = 0;           // rows with pivot in the A block
  RationalMatrix EB_top;   // (N-2n) x N
  RationalMatrix EA_top;   // (N-2n) x N
  RationalMatrix EA_bot;   // 2n x N
  RationalMatrix E_top;    // (N-2n) x N
  RationalMatrix E_bot;    // 2n x N
  std::vector<int> pivots;  // pivot columns of EB_top, increasing
  // Filled by extend_eprime once clause (4) data is available:
  RationalMatrix Etilde;      // (N-2n) x 2n
  RationalMatrix Eprime_top;  // (N-2n) x N
  RationalMatrix Eprime_bot;  // = E_bot
  bool has_eprime = false;
};

inline NzReduction reduce_nz(const NzPair& p) {
  const int n = p.N();
  NzReduction r;
  RrefWitness w = rref_with_witness(RationalMatrix::hcat(p.B, p.A));
  r.E = w.elem;
  r.det_E = w.det_elem;
  int top = 0;
  for (int c : w.pivots)
    if (c < n) ++top;
  r.two_n = n - top;
  const RationalMatrix eb = w.rref.block(0, 0, n, n);
  const RationalMatrix ea = w.rref.block(0, n, n, n);
  r.EB_top = eb.block(0, 0, top, n);
  r.EA_top = ea.block(0, 0, top, n);
  r.EA_bot = ea.block(top, 0, r.two_n, n);
  r.E_top = r.E.block(0, 0, top, n);
  r.E_bot = r.E.block(top, 0, r.two_n, n);
  if (!eb.block(top, 0, r.two_n, n).is_zero())
    throw std::logic_error("reduce_nz: bottom-left block not zero");
  for (int i = 0; i < top; ++i) r.pivots.push_back(w.pivots[i]);
  if (r.two_n == 0) {
    r.Etilde = RationalMatrix(top, 0);
    r.Eprime_top = r.E_top;
    r.Eprime_bot = r.E_bot;
    r.has_eprime = true;
  }
  return r;
}

/// Continues the elimination of the stacked block matrix: solves
/// Etilde * EA_bot = EB_top * G - EA_top, which exists exactly when the two
/// matrices of the fourth defining clause are row equivalent. E' = [[Id,
/// Etilde],[0, Id]] E.
inline bool extend_eprime(NzReduction& r, const RationalMatrix& G) {
  if (r.two_n == 0) return true;
  const RationalMatrix target = r.EB_top * G - r.EA_top;
  const RationalMatrix lhs_t = r.EA_bot.transpose();  // N x 2n
  const int top = r.EB_top.rows();
  r.Etilde = RationalMatrix(top, r.two_n);
  for (int i = 0; i < top; ++i) {
    std::vector<Rational> rhs(lhs_t.rows());
    for (int j = 0; j < lhs_t.rows(); ++j) rhs[j] = target(i, j);
    auto sol = solve_rational(lhs_t, rhs);
    if (!sol) return false;
    for (int j = 0; j < r.two_n; ++j) r.Etilde(i, j) = (*sol)[j];
  }
  r.Eprime_top = r.E_top + r.Etilde * r.E_bot;
  r.Eprime_bot = r.E_bot;
  r.has_eprime = true;
  return true;
}

/// Symplectic pairing of two rows written in (Log z | Log z'') coordinates.
inline Rational symplectic_pairing(const std::vector<Rational>& ra, const std::vector<Rational>& rb,
                                   const std::vector<Rational>& sa,
                                   const std::vector<Rational>& sb) {
  Rational w;
  for (size_t k = 0; k < ra.size(); ++k) w += ra[k] * sb[k] - rb[k] * sa[k];
  return w;
}

struct SymplecticReport {
  bool edge_pairings_zero = false;      // all pairings among rows of (A|B)
  bool meridian_edges_zero = false;     // meridian against the edge rows
  Rational meridian_longitude;          // pairing against the longitude row
  bool generator_pair = false;          // |pairing| == 2
  bool orientation_convention = false;  // pairing == -2, i.e. i(l, m) = +1
};

/// Verifies that the symplectic form vanishes on the row space of (A|B) and
/// that the meridian pairs to zero with the edge rows and to +-2 with the
/// longitude row (twice the algebraic intersection number).
inline SymplecticReport symplectic_check(const NzPair& p, const PeripheralCurve& meridian,
                                         const PeripheralCurve& longitude) {
  const int n = p.N();
  auto row_of = [&](const RationalMatrix& m, int i) {
    std::vector<Rational> v(n);
    for (int j = 0; j < n; ++j) v[j] = m(i, j);
    return v;
  };
  SymplecticReport rep;
  rep.edge_pairings_zero = true;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!symplectic_pairing(row_of(p.A, i), row_of(p.B, i), row_of(p.A, j), row_of(p.B, j))
               .is_zero())
        rep.edge_pairings_zero = false;
  const CurveRow m = curve_row(meridian);
  const CurveRow l = curve_row(longitude);
  rep.meridian_edges_zero = true;
  for (int i = 0; i + 1 < n; ++i)
    if (!symplectic_pairing(m.a, m.b, row_of(p.A, i), row_of(p.B, i)).is_zero())
      rep.meridian_edges_zero = false;
  rep.meridian_longitude = symplectic_pairing(m.a, m.b, l.a, l.b);
  rep.generator_pair = rep.meridian_longitude.abs() == Rational(2);
  rep.orientation_convention = rep.meridian_longitude == Rational(-2);
  if (!rep.edge_pairings_zero || !rep.meridian_edges_zero)
    throw SymplecticViolation("peripheral data violates the symplectic pairing identities");
  return rep;
}

/// Integer vectors f, f', f'' with f+f'+f'' = 1, edge sums 2 and vanishing
/// sums over both peripheral curves (the strong variant).
struct Flattening {
  std::vector<Integer> f, fp, fpp;
  int size() const { return int(f.size()); }
};

inline bool verify_flattening(const GluingMatrices& gm, const PeripheralCurve& meridian,
                              const Flattening& fl) {
  const int n = gm.N();
  if (fl.size() != n) return false;
  for (int i = 0; i < n; ++i)
    if (!(Rational(fl.f[i]) + Rational(fl.fp[i]) + Rational(fl.fpp[i]) == Rational(1)))
      return false;
  for (int i = 0; i < n; ++i) {
    Rational s;
    for (int j = 0; j < n; ++j)
      s += gm.G(i, j) * Rational(fl.f[j]) + gm.Gp(i, j) * Rational(fl.fp[j]) +
           gm.Gpp(i, j) * Rational(fl.fpp[j]);
    if (i + 1 < n && s != Rational(2)) return false;
    if (i + 1 == n && !s.is_zero()) return false;
  }
  Rational sm;
  for (int j = 0; j < n; ++j)
    sm += Rational(meridian.counts[j][0]) * Rational(fl.f[j]) +
          Rational(meridian.counts[j][1]) * Rational(fl.fp[j]) +
          Rational(meridian.counts[j][2]) * Rational(fl.fpp[j]);
  return sm.is_zero();
}

inline Flattening solve_strong_flattening(const GluingMatrices& gm,
                                          const PeripheralCurve& meridian) {
  const int n = gm.N();
  // Unknowns (f, f', f'') stacked; rows: per-tet sums, N-1 edge rows = 2,
  // longitude row = 0, meridian row = 0.
  RationalMatrix sys(2 * n + 1, 3 * n);
  std::vector<Rational> rhs(2 * n + 1);
  for (int i = 0; i < n; ++i) {
    sys(i, i) = Rational(1);
    sys(i, n + i) = Rational(1);
    sys(i, 2 * n + i) = Rational(1);
    rhs[i] = Rational(1);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sys(n + i, j) = gm.G(i, j);
      sys(n + i, n + j) = gm.Gp(i, j);
      sys(n + i, 2 * n + j) = gm.Gpp(i, j);
    }
    rhs[n + i] = (i + 1 < n) ? Rational(2) : Rational(0);
  }
  for (int j = 0; j < n; ++j) {
    sys(2 * n, j) = Rational(meridian.counts[j][0]);
    sys(2 * n, n + j) = Rational(meridian.counts[j][1]);
    sys(2 * n, 2 * n + j) = Rational(meridian.counts[j][2]);
  }
  rhs[2 * n] = Rational(0);
  IntegerSolveResult res = integer_solve(sys, rhs);
  if (res.status != IntegerSolveStatus::Solved)
    throw NoIntegerSolution("no strong combinatorial flattening found (invalid input)");
  Flattening fl;
  fl.f.assign(res.x.begin(), res.x.begin() + n);
  fl.fp.assign(res.x.begin() + n, res.x.begin() + 2 * n);
  fl.fpp.assign(res.x.begin() + 2 * n, res.x.end());
  return fl;
}

}  // namespace famed
