#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "famed/famed_check.hpp"
#include "famed/geometry.hpp"
#include "famed/special_fn.hpp"

namespace famed {

using VecD = Eigen::VectorXd;
using MatD = Eigen::MatrixXd;

struct CutProximity : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BandViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegeneratePivot : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything the potential functions need, extracted once from a verified
/// certificate: the affine parametrization phi(x) = (EB)^T x - i(pi - a^0),
/// the quadratic form, the linear coefficients and the meridian C-vector.
struct PotentialContext {
  int N = 0, d = 0;  // d = N - 2n
  MatD P;            // (EB)_{N-2n}, d x N
  MatD Pt;           // N x d
  MatD G;            // script G, N x N
  MatD Q;            // N x N
  MatD Ep_top;       // E'_{N-2n}, d x N
  VecD eps;          // tetrahedron signs
  VecD nu;           // nu in radians (pi * integer)
  VecD a0;           // a-angles of the base angle structure (radians)
  std::vector<int> pivots;
  VecD cvec;          // C-vector (length d)
  int pivot_var = -1;  // first index with C != 0
  cplx c_const;        // w = sum C_k x_k - c_const, c_const = -i mu(alpha0)
  double delta = 1e-3;  // cut guard handed to the dilogarithms

  // exact copies for the rational identity checks
  RationalMatrix P_exact, G_exact, Q_exact, Ep_exact;
  std::vector<Integer> nu_over_pi;
  RationalAngleStructure alpha0_exact;

  VecC phi(const VecC& x) const {
    VecC y = Pt.cast<cplx>() * x;
    for (int k = 0; k < N; ++k) y[k] -= cplx(0.0, std::numbers::pi - a0[k]);
    return y;
  }

  /// Contour offset of an angle structure: a_k - a0_k at the pivots.
  VecD v_alpha(const AngleStructure& alpha) const {
    VecD v(d);
    for (int i = 0; i < d; ++i) v[i] = alpha.angles[pivots[i]][0] - a0[pivots[i]];
    return v;
  }
};

inline PotentialContext build_context(const OrderedTriangulation& t, const FamedCertificate& cert,
                                      const RationalAngleStructure& alpha0) {
  if (!cert.famed_l() || !cert.nz.has_eprime)
    throw NotFamed("build_context: certificate does not establish the first definition");
  PotentialContext ctx;
  ctx.N = t.N;
  ctx.d = t.N - cert.nz.two_n;
  auto to_eigen = [](const RationalMatrix& m) {
    MatD out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_double();
    return out;
  };
  ctx.P = to_eigen(cert.nz.EB_top);
  ctx.Pt = ctx.P.transpose();
  ctx.G = to_eigen(cert.kernel.G);
  ctx.Q = to_eigen(cert.kernel.Q);
  ctx.Ep_top = to_eigen(cert.nz.Eprime_top);
  ctx.eps.resize(t.N);
  for (int k = 0; k < t.N; ++k) ctx.eps[k] = t.sign[k];
  const GluingMatrices gm = build_gluing_matrices(t, t.longitude);
  const NzPair p = build_nz_pair(gm);
  ctx.nu.resize(t.N);
  for (int k = 0; k < t.N; ++k) ctx.nu[k] = std::numbers::pi * p.nu_over_pi[k].to_double();
  ctx.nu_over_pi = p.nu_over_pi;
  ctx.a0.resize(t.N);
  for (int k = 0; k < t.N; ++k)
    ctx.a0[k] = alpha0.angles[k][0].to_double() * std::numbers::pi;
  ctx.pivots = cert.nz.pivots;
  ctx.cvec.resize(ctx.d);
  for (int i = 0; i < ctx.d; ++i) ctx.cvec[i] = cert.cvec.empty()
                                                    ? (Rational(-2) * cert.nz.Eprime_top(i, t.N - 1))
                                                          .to_double()
                                                    : cert.cvec[i].to_double();
  for (int i = 0; i < ctx.d && ctx.pivot_var < 0; ++i)
    if (ctx.cvec[i] != 0.0) ctx.pivot_var = i;
  // c_const = -i mu(alpha0) with mu read through the pivot a-angles
  double mu0 = 0;
  for (int i = 0; i < ctx.d; ++i) mu0 += ctx.cvec[i] * ctx.a0[ctx.pivots[i]];
  ctx.c_const = cplx(0.0, -mu0);
  ctx.P_exact = cert.nz.EB_top;
  ctx.G_exact = cert.kernel.G;
  ctx.Q_exact = cert.kernel.Q;
  ctx.Ep_exact = cert.nz.Eprime_top;
  ctx.alpha0_exact = alpha0;
  return ctx;
}

struct PotentialValue {
  cplx value;      // full potential
  cplx alg;        // value minus the i sum L(phi_k) term
  VecC grad;       // holomorphic gradient
  MatC hess;       // holomorphic Hessian
  VecC phi;        // the strip variables
};

namespace detail {

/// E'_top (nu - i u~) and the value-level linear coefficient
/// c(xi) = E'_top (nu - i u~) - P G pi 1; the P G pi term cancels out of
/// the gradient.
struct LinearParts {
  VecC ep_nu;  // E'_top (nu - i u~)
  VecC c;      // ep_nu - P G pi 1
};

inline LinearParts linear_coeff(const PotentialContext& ctx, cplx xi) {
  VecC nu_c = ctx.nu.cast<cplx>();
  nu_c[ctx.N - 1] -= cplx(0.0, 1.0) * xi;
  LinearParts lp;
  lp.ep_nu = ctx.Ep_top.cast<cplx>() * nu_c;
  const VecD gbpi = ctx.P * ctx.G * VecD::Constant(ctx.N, std::numbers::pi);
  lp.c = lp.ep_nu - gbpi.cast<cplx>();
  return lp;
}

}  // namespace detail

/// The complexified potential S~(x; xi) together with its closed-form
/// gradient and Hessian.
inline PotentialValue eval_S(const PotentialContext& ctx, const VecC& x, cplx xi,
                             bool with_L = true) {
  PotentialValue out;
  out.phi = ctx.phi(x);
  const cplx i(0.0, 1.0);
  const detail::LinearParts lp = detail::linear_coeff(ctx, xi);
  const VecC qphi = ctx.Q.cast<cplx>() * out.phi;
  cplx quad = 0, signterm = 0, lsum = 0, linear = 0;
  for (int k = 0; k < ctx.N; ++k) {
    quad += out.phi[k] * qphi[k];
    signterm += 0.5 * (ctx.eps[k] - 1.0) * out.phi[k] * out.phi[k];
  }
  for (int j = 0; j < ctx.d; ++j) linear += x[j] * lp.c[j];
  out.alg = -0.5 * i * quad - 0.5 * i * signterm - linear;
  VecC log_z(ctx.N), log_zpp(ctx.N), inv_one_pe(ctx.N);
  for (int k = 0; k < ctx.N; ++k) {
    if (with_L) {
      if (sf::cut_distance(out.phi[k]) < ctx.delta)
        throw CutProximity("eval_S: phi_k within delta of a dilogarithm cut");
      lsum += sf::cont_L(out.phi[k], ctx.delta);
    }
    log_z[k] = out.phi[k] + i * std::numbers::pi;
    log_zpp[k] = std::log(1.0 + std::exp(-out.phi[k]));
    inv_one_pe[k] = 1.0 / (1.0 + std::exp(out.phi[k]));
  }
  out.value = out.alg + (with_L ? i * lsum : cplx(0.0));
  // grad S~ = -i [P G Log z + P Log z''] - E'(nu - i u~)
  const MatC Pc = ctx.P.cast<cplx>();
  out.grad = -i * (Pc * (ctx.G.cast<cplx>() * log_z) + Pc * log_zpp) - lp.ep_nu;
  // Hess S~ = -i P (G - diag(1/(1+e^y))) P^T
  MatC inner = ctx.G.cast<cplx>();
  for (int k = 0; k < ctx.N; ++k) inner(k, k) -= inv_one_pe[k];
  out.hess = -i * (Pc * inner * Pc.transpose());
  return out;
}

/// Recovers the potential coordinates of a solved shape assignment through
/// the pivot rows of the parametrization, verifying membership.
inline VecC x_from_shapes(const PotentialContext& ctx, const ShapeAssignment& s,
                          double tol = 1e-8) {
  VecC target(ctx.N);
  for (int k = 0; k < ctx.N; ++k)
    target[k] = s.y[k] + cplx(0.0, std::numbers::pi - ctx.a0[k]);
  VecC x(ctx.d);
  for (int i = 0; i < ctx.d; ++i) x[i] = target[ctx.pivots[i]];
  const VecC recon = ctx.Pt.cast<cplx>() * x;
  if ((recon - target).norm() > tol)
    throw std::invalid_argument("x_from_shapes: shapes do not satisfy the delta constraints");
  return x;
}

/// J(w, x_2..) = S~ with the nu-only linear term, through the substitution
/// that eliminates x_{pivot_var} in favour of w.
struct JonesValue {
  cplx value;
  cplx alg;
  cplx dJ_dw;
  VecC fiber_grad;   // d/dx_hat, length d-1
  MatC hess;         // full (w, x_hat) Hessian, d x d
  VecC x;            // the lifted potential coordinates
};

/// Lift (w, x_hat) to the potential coordinates.
inline VecC lift_jones(const PotentialContext& ctx, cplx w, const VecC& xhat) {
  if (ctx.pivot_var < 0) throw DegeneratePivot("lift_jones: all C entries vanish");
  VecC x(ctx.d);
  int h = 0;
  cplx acc = w + ctx.c_const;
  for (int i = 0; i < ctx.d; ++i) {
    if (i == ctx.pivot_var) continue;
    x[i] = xhat[h];
    acc -= ctx.cvec[i] * xhat[h];
    ++h;
  }
  x[ctx.pivot_var] = acc / ctx.cvec[ctx.pivot_var];
  return x;
}

inline JonesValue eval_J(const PotentialContext& ctx, cplx w, const VecC& xhat,
                         bool with_L = true) {
  const VecC x = lift_jones(ctx, w, xhat);
  // nu-only potential: no xi subtraction in the linear term
  PotentialValue s0 = eval_S(ctx, x, cplx(0.0), with_L);
  JonesValue out;
  out.x = x;
  out.value = s0.value;
  out.alg = s0.alg;
  // chain rule through x = M (w, x_hat) + const
  MatC m = MatC::Zero(ctx.d, ctx.d);
  const cplx c1 = ctx.cvec[ctx.pivot_var];
  m(ctx.pivot_var, 0) = 1.0 / c1;
  int h = 1;
  for (int i = 0; i < ctx.d; ++i) {
    if (i == ctx.pivot_var) continue;
    m(i, h) = 1.0;
    m(ctx.pivot_var, h) = -ctx.cvec[i] / c1;
    ++h;
  }
  const VecC g = m.transpose() * s0.grad;
  out.dJ_dw = g[0];
  out.fiber_grad = g.tail(ctx.d - 1);
  out.hess = m.transpose() * s0.hess * m;
  return out;
}

/// Newton iteration for the fiber critical point of J at fixed w.
inline JonesValue solve_jones_fiber(const PotentialContext& ctx, cplx w, VecC xhat,
                                    double tol = 1e-12, int max_iter = 60) {
  if (ctx.d < 2) {
    // no fiber variables: the critical point is the lift itself
    return eval_J(ctx, w, VecC(0));
  }
  JonesValue v = eval_J(ctx, w, xhat);
  for (int it = 0; it < max_iter; ++it) {
    if (v.fiber_grad.norm() < tol) return v;
    const MatC h = v.hess.bottomRightCorner(ctx.d - 1, ctx.d - 1);
    const VecC step = Eigen::PartialPivLU<MatC>(h).solve(-v.fiber_grad);
    xhat += step;
    v = eval_J(ctx, w, xhat);
  }
  if (v.fiber_grad.norm() >= tol)
    throw NoConvergence("solve_jones_fiber: Newton failed");
  return v;
}

struct ConcavityReport {
  bool all_negative_definite = true;
  bool band_ok = true;
  double max_eigenvalue = -1e300;
  double min_eigenvalue = 1e300;
  int points = 0;
};

/// Scans Hess_{Re x} Re S~ = Re Hess S~ over a real grid on the horizontal
/// plane through iv, checking negative (semi)definiteness inside the band
/// Im y in (-pi, 0).
inline ConcavityReport concavity_scan(const PotentialContext& ctx, const VecD& v, double half_width,
                                      int points_per_axis, bool require_strict = true) {
  ConcavityReport rep;
  // verify the plane sits inside the closed band first
  {
    VecC x0(ctx.d);
    for (int i = 0; i < ctx.d; ++i) x0[i] = cplx(0.0, v[i]);
    const VecC y = ctx.phi(x0);
    for (int k = 0; k < ctx.N; ++k)
      if (y[k].imag() < -std::numbers::pi - 1e-12 || y[k].imag() > 1e-12) {
        rep.band_ok = false;
        rep.all_negative_definite = false;
        throw BandViolation("concavity_scan: contour leaves the horizontal band");
      }
  }
  std::vector<double> ticks(points_per_axis);
  for (int i = 0; i < points_per_axis; ++i)
    ticks[i] = -half_width + 2.0 * half_width * i / (points_per_axis - 1);
  std::vector<int> idx(ctx.d, 0);
  for (;;) {
    VecC x(ctx.d);
    for (int i = 0; i < ctx.d; ++i) x[i] = cplx(ticks[idx[i]], v[i]);
    PotentialValue s = eval_S(ctx, x, cplx(0.0), false);
    MatD re_h = s.hess.real();
    re_h = 0.5 * (re_h + re_h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatD> es(re_h);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, lo);
    rep.max_eigenvalue = std::max(rep.max_eigenvalue, hi);
    if (require_strict ? hi >= 0.0 : hi > 1e-12) rep.all_negative_definite = false;
    ++rep.points;
    int axis = 0;
    while (axis < ctx.d && ++idx[axis] == points_per_axis) idx[axis++] = 0;
    if (axis == ctx.d) break;
  }
  return rep;
}

/// W(alpha) = Q (pi - a) + (eps_k c_k), in units of pi, exact.
inline std::vector<Rational> w_alpha_exact(const PotentialContext& ctx,
                                           const RationalAngleStructure& alpha,
                                           const std::vector<int>& signs) {
  std::vector<Rational> w(ctx.N);
  for (int i = 0; i < ctx.N; ++i) {
    Rational acc;
    for (int j = 0; j < ctx.N; ++j) acc += ctx.Q_exact(i, j) * (Rational(1) - alpha.angles[j][0]);
    acc += Rational(signs[i]) * alpha.angles[i][2];
    w[i] = acc;
  }
  return w;
}

/// Exact identity -(EB) W(alpha) = E'(nu + u) - (EB) G pi, units of pi;
/// lambda_hat is the longitude angular holonomy over pi.
inline bool lemma_w_identity(const PotentialContext& ctx, const RationalAngleStructure& alpha,
                             const std::vector<int>& signs, const Rational& lambda_hat) {
  const auto w = w_alpha_exact(ctx, alpha, signs);
  for (int i = 0; i < ctx.d; ++i) {
    Rational lhs;
    for (int j = 0; j < ctx.N; ++j) lhs += -ctx.P_exact(i, j) * w[j];
    Rational rhs;
    for (int j = 0; j < ctx.N; ++j) {
      Rational nu_u = Rational(ctx.nu_over_pi[j]);
      if (j == ctx.N - 1) nu_u += lambda_hat;
      rhs += ctx.Ep_exact(i, j) * nu_u;
    }
    for (int j = 0; j < ctx.N; ++j) {
      Rational pg;
      for (int k = 0; k < ctx.N; ++k) pg += ctx.P_exact(i, k) * ctx.G_exact(k, j);
      rhs -= pg;
    }
    if (lhs != rhs) return false;
  }
  return true;
}

/// |det Hess S~| divided by the predicted proportionality factor
/// |G det(E) (prod z_k'')^{-1} (prod z^{-f''} z''^{f}) tau|; the quotient is
/// a constant independent of the deformation parameter.
struct HessianOneLoop {
  cplx det_hess;
  cplx prefactor_times_tau;
  double ratio_abs = 0;
};

inline HessianOneLoop hessian_one_loop_check(const PotentialContext& ctx,
                                             const FamedCertificate& cert,
                                             const ShapeAssignment& shapes, cplx tau,
                                             const Flattening& fl, cplx xi) {
  HessianOneLoop out;
  const VecC xc = x_from_shapes(ctx, shapes);
  PotentialValue s = eval_S(ctx, xc, xi);
  out.det_hess = Eigen::PartialPivLU<MatC>(s.hess).determinant();
  // G = det( (EB)_top^T | H ), H the unit columns at the pivots of (EA)_bot
  RationalMatrix gmat(ctx.N, ctx.N);
  for (int i = 0; i < ctx.N; ++i)
    for (int j = 0; j < ctx.d; ++j) gmat(i, j) = cert.nz.EB_top(j, i);
  {
    // pivot columns of the RREF rows below the B block
    RrefWitness w = rref_with_witness(cert.nz.EA_bot);
    for (int j = 0; j < cert.nz.two_n; ++j) gmat(w.pivots[j], ctx.d + j) = Rational(1);
  }
  const RrefWitness gw = rref_with_witness(gmat);
  if (gw.rank() != ctx.N) throw std::logic_error("hessian_one_loop_check: G matrix singular");
  const Rational g_det = gw.det_elem.inverse();
  const Rational det_e = cert.nz.det_E;
  cplx pref = cplx(g_det.to_double() * det_e.to_double(), 0.0);
  for (int k = 0; k < ctx.N; ++k) pref /= shapes.zpp(k);
  for (int k = 0; k < ctx.N; ++k)
    pref *= std::pow(shapes.z(k), -double(fl.fpp[k].to_long())) *
            std::pow(shapes.zpp(k), double(fl.f[k].to_long()));
  out.prefactor_times_tau = pref * tau;
  out.ratio_abs = std::abs(out.det_hess) / std::abs(out.prefactor_times_tau);
  return out;
}

/// The hbar-free prefactor h(y) = exp(sum (i y_k / 2 pi) L'(y_k)
/// - (i/pi) L(y_k)).
inline cplx h_function(const VecC& y, double delta = 1e-3) {
  cplx s = 0;
  const cplx i(0.0, 1.0);
  for (int k = 0; k < y.size(); ++k)
    s += i * y[k] / (2.0 * std::numbers::pi) * sf::cont_L_prime(y[k], delta) -
         i / std::numbers::pi * sf::cont_L(y[k], delta);
  return std::exp(s);
}

/// The auxiliary non-vanishing factor of the expansion, including the
/// flattening weight.
inline cplx r_function(const ShapeAssignment& s, const Flattening& fl) {
  const cplx i(0.0, 1.0);
  cplx sum = 0;
  for (int k = 0; k < s.size(); ++k) {
    const cplx z = s.z(k);
    sum += -i * (s.log_z(k) - i * std::numbers::pi) * std::log(1.0 - z) /
               (2.0 * std::numbers::pi) -
           i / std::numbers::pi * sf::li2(z);
  }
  cplx weight = 1.0;
  for (int k = 0; k < s.size(); ++k)
    weight *= std::pow(s.z(k), -double(fl.fpp[k].to_long())) *
              std::pow(s.zpp(k), double(fl.f[k].to_long()) - 1.0);
  return std::exp(sum) / weight;
}

}  // namespace famed
