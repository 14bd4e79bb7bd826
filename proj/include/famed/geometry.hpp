#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "famed/nz_data.hpp"
#include "famed/special_fn.hpp"
#include "famed/triangulation.hpp"

namespace famed {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateShape : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContinuationBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BranchJump : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape parameters through the strip variable y = Log z - i pi. The y
/// branch is the fundamental datum; all logarithms below are defined from
/// it, so Log z + Log z' + Log z'' = i pi holds identically.
struct ShapeAssignment {
  VecC y;

  int size() const { return int(y.size()); }
  cplx z(int k) const { return -std::exp(y[k]); }
  cplx log_z(int k) const { return y[k] + cplx(0.0, std::numbers::pi); }
  cplx log_zpp(int k) const { return std::log(1.0 + std::exp(-y[k])); }
  cplx log_zp(int k) const { return -std::log(1.0 + std::exp(y[k])); }
  cplx zp(int k) const { return 1.0 / (1.0 - z(k)); }
  cplx zpp(int k) const { return (z(k) - 1.0) / z(k); }

  static ShapeAssignment from_shapes(const std::vector<cplx>& zs) {
    ShapeAssignment s;
    s.y.resize(Eigen::Index(zs.size()));
    for (size_t k = 0; k < zs.size(); ++k)
      s.y[Eigen::Index(k)] = std::log(zs[k]) - cplx(0.0, std::numbers::pi);
    return s;
  }

  /// Residuals of the defining polynomials z(1 - z'') - 1 etc.
  double polynomial_residual() const {
    double r = 0;
    for (int k = 0; k < size(); ++k) {
      r = std::max(r, std::abs(z(k) * (1.0 - zpp(k)) - 1.0));
      r = std::max(r, std::abs(zp(k) * (1.0 - z(k)) - 1.0));
      r = std::max(r, std::abs(zpp(k) * (1.0 - zp(k)) - 1.0));
    }
    return r;
  }
};

struct ConeStructure {
  cplx xi;  // prescribed holonomy of the last (curve) row
  ShapeAssignment shapes;
  double residual = 0;
  double jacobian_condition = 0;  // of the final Newton system
  int num_flat = 0;               // tetrahedra with Im z = 0 (within delta)
  bool negatively_oriented = false;  // some Im z < 0 (flagged, not rejected)
};

namespace detail {

inline VecC gluing_residual(const NzPair& p, const ShapeAssignment& s, cplx xi) {
  const int n = p.N();
  VecC f = VecC::Zero(n);
  for (int i = 0; i < n; ++i) {
    cplx acc = 0;
    for (int j = 0; j < n; ++j)
      acc += p.A(i, j).to_double() * s.log_z(j) + p.B(i, j).to_double() * s.log_zpp(j);
    acc -= cplx(0.0, std::numbers::pi) * p.nu_over_pi[i].to_double();
    if (i == n - 1) acc -= xi;
    f[i] = acc;
  }
  return f;
}

inline MatC gluing_jacobian(const NzPair& p, const ShapeAssignment& s) {
  const int n = p.N();
  MatC j(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      // d Log z / d y = 1, d Log z'' / d y = -1 / (1 + e^y) = -1/(1-z)
      j(i, k) = cplx(p.A(i, k).to_double()) -
                cplx(p.B(i, k).to_double()) / (1.0 + std::exp(s.y[k]));
    }
  return j;
}

}  // namespace detail

/// Damped Newton iteration on the y variables for
/// A Log z + B Log z'' = i nu + (0,..,0,xi).
inline ConeStructure solve_gluing(const NzPair& p, cplx xi,
                                  std::optional<ShapeAssignment> seed = std::nullopt,
                                  double tol = 1e-13, int max_iter = 80) {
  const int n = p.N();
  ShapeAssignment s;
  if (seed) {
    s = *seed;
  } else {
    s.y = VecC::Constant(n, cplx(0.0, -std::numbers::pi / 2));  // z = i everywhere
  }
  VecC f = detail::gluing_residual(p, s, xi);
  double fn = f.norm();
  for (int it = 0; it < max_iter; ++it) {
    if (fn < tol) break;
    const MatC jac = detail::gluing_jacobian(p, s);
    Eigen::PartialPivLU<MatC> lu(jac);
    const VecC dy = lu.solve(-f);
    double t = 1.0;
    bool improved = false;
    for (int back = 0; back < 30; ++back) {
      ShapeAssignment trial;
      trial.y = s.y + t * dy;
      bool degenerate = false;
      for (int k = 0; k < n; ++k) {
        const cplx zk = trial.z(k);
        if (std::abs(zk) < 1e-8 || std::abs(zk - 1.0) < 1e-8 || std::abs(trial.y[k]) > 40.0)
          degenerate = true;
      }
      if (!degenerate) {
        const VecC ft = detail::gluing_residual(p, trial, xi);
        if (ft.norm() < fn || t == 1.0) {
          if (ft.norm() < fn * (1.0 - 1e-4 * t) || ft.norm() < tol) {
            s = trial;
            f = ft;
            fn = ft.norm();
            improved = true;
            break;
          }
        }
      }
      t *= 0.5;
    }
    if (!improved) throw NoConvergence("solve_gluing: line search stalled");
  }
  if (!(fn < tol)) throw NoConvergence("solve_gluing: residual did not reach tolerance");
  ConeStructure out;
  out.xi = xi;
  out.shapes = s;
  out.residual = fn;
  const double delta = 1e-3;
  for (int k = 0; k < n; ++k) {
    const cplx zk = s.z(k);
    if (std::abs(zk) < 1e-10 || std::abs(zk - 1.0) < 1e-10)
      throw DegenerateShape("solve_gluing: degenerate shape in solution");
    if (std::abs(zk.imag()) < 1e-12 * (1.0 + std::abs(zk))) {
      // flat tetrahedron: keep it only away from the branch points
      if (std::abs(s.y[k].real()) <= delta)
        throw DegenerateShape("solve_gluing: flat shape within delta of a branch point");
      ++out.num_flat;
    } else if (zk.imag() < 0) {
      out.negatively_oriented = true;
    }
  }
  {
    Eigen::JacobiSVD<MatC> svd(detail::gluing_jacobian(p, s));
    const auto& sv = svd.singularValues();
    out.jacobian_condition = sv(0) / sv(sv.size() - 1);
  }
  return out;
}

/// Sum of tetrahedron volumes; flat shapes contribute nothing. Shapes that
/// are real up to roundoff of the exp/log round-trip are snapped to flat.
inline double volume(const ShapeAssignment& s) {
  double v = 0;
  for (int k = 0; k < s.size(); ++k) {
    const cplx z = s.z(k);
    if (std::abs(z.imag()) < 1e-13 * (1.0 + std::abs(z.real()))) continue;
    v += sf::bloch_wigner(z);
  }
  return v;
}

/// Logarithmic holonomy of a normal curve at the given shapes.
inline cplx holonomy(const ShapeAssignment& s, const PeripheralCurve& sigma) {
  cplx h = 0;
  for (int k = 0; k < s.size(); ++k)
    h += double(sigma.counts[k][0]) * s.log_z(k) + double(sigma.counts[k][1]) * s.log_zp(k) +
         double(sigma.counts[k][2]) * s.log_zpp(k);
  return h;
}

/// Continuation family from the complete structure with the holonomy of the
/// driving curve marched to `target`.
struct DeformationPath {
  std::vector<cplx> t;                 // driving-curve holonomy per sample
  std::vector<ConeStructure> samples;  // solved structures, same indexing
  std::vector<cplx> w_other;           // holonomy of the companion curve
};

inline DeformationPath deform_path(const NzPair& p_driving, const PeripheralCurve& other,
                                   cplx target, int steps, double radius = 0.3) {
  if (std::abs(target) > radius)
    throw ContinuationBreakdown("deform_path: target outside continuation radius");
  if (steps < 1) throw std::invalid_argument("deform_path: need at least one step");
  DeformationPath path;
  ConeStructure cur = solve_gluing(p_driving, 0.0);
  path.t.push_back(0.0);
  path.samples.push_back(cur);
  path.w_other.push_back(holonomy(cur.shapes, other));
  if (target == 0.0) return path;
  const double branch_bound = 0.6;
  int k = 1;
  while (k <= steps) {
    const cplx xi = target * (double(k) / steps);
    bool ok = false;
    try {
      ConeStructure nxt = solve_gluing(p_driving, xi, cur.shapes);
      if ((nxt.shapes.y - cur.shapes.y).norm() > branch_bound)
        throw BranchJump("deform_path: step too large for branch continuity");
      cur = nxt;
      ok = true;
    } catch (const NoConvergence&) {
      ok = false;
    } catch (const BranchJump&) {
      ok = false;
    }
    if (!ok) {
      // halve by densifying: insert an intermediate solve
      const cplx ximid = target * ((double(k) - 0.5) / steps);
      ConeStructure mid = solve_gluing(p_driving, ximid, cur.shapes);
      if ((mid.shapes.y - cur.shapes.y).norm() > branch_bound)
        throw ContinuationBreakdown("deform_path: breakdown at step " + std::to_string(k));
      cur = solve_gluing(p_driving, target * (double(k) / steps), mid.shapes);
    }
    path.t.push_back(target * (double(k) / steps));
    path.samples.push_back(cur);
    path.w_other.push_back(holonomy(cur.shapes, other));
    ++k;
  }
  return path;
}

/// Samples of the potential phi(w) = i Vol_0 + (1/2) integral of w_other,
/// integrated along the (straight) continuation path by composite Simpson
/// on each consecutive sample triple. Only increments and the real-part
/// anchor Re(i phi(0)) = -Vol_0 are meaningful; the imaginary part of the
/// anchor (a Chern-Simons term) is not computed.
struct PotentialTable {
  std::vector<cplx> w;        // driving holonomy samples
  std::vector<cplx> phi;      // potential samples
  std::vector<cplx> dphi_dw;  // w_other / 2, the exact derivative
};

inline PotentialTable nz_potential(const DeformationPath& path) {
  PotentialTable tab;
  const size_t n = path.t.size();
  tab.w = path.t;
  tab.dphi_dw.resize(n);
  for (size_t i = 0; i < n; ++i) tab.dphi_dw[i] = 0.5 * path.w_other[i];
  tab.phi.resize(n);
  const double vol0 = volume(path.samples[0].shapes);
  tab.phi[0] = cplx(0.0, vol0);
  size_t j = 2;
  for (; j < n; j += 2) {
    const cplx h = tab.w[j - 1] - tab.w[j - 2];
    const cplx f0 = tab.dphi_dw[j - 2], f1 = tab.dphi_dw[j - 1], f2 = tab.dphi_dw[j];
    tab.phi[j - 1] = tab.phi[j - 2] + h * (5.0 * f0 + 8.0 * f1 - f2) / 12.0;
    tab.phi[j] = tab.phi[j - 2] + h * (f0 + 4.0 * f1 + f2) / 3.0;
  }
  if (j == n) {  // odd number of intervals: close with a trapezoid step
    const cplx h = tab.w[n - 1] - tab.w[n - 2];
    tab.phi[n - 1] = tab.phi[n - 2] + 0.5 * h * (tab.dphi_dw[n - 2] + tab.dphi_dw[n - 1]);
  }
  return tab;
}

}  // namespace famed
