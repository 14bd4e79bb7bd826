#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "famed/potential.hpp"
#include "famed/special_fn.hpp"

namespace famed {

struct DimensionTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TailBoundExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Quadrature controls. Grid spacing scales with sqrt(hbar) (the
/// oscillation wavelength of the quadratic phase); truncation is chosen so
/// the boundary integrand is below tail_eps relative to the peak.
struct QuadratureSpec {
  double spacing_factor = 0.15;  // grid spacing = spacing_factor * sqrt(hbar)
  double tail_log_eps = -30.0;   // stop when Re log f drops this far below the peak
  double max_half_width = 60.0;
  int max_axis_points = 4000;
};

namespace detail {

/// log Phi_b sampled along one horizontal line of its argument plane with
/// barycentric 8-point Lagrange evaluation between samples.
class FaddeevLineTable {
 public:
  FaddeevLineTable(const sf::QuantumParams& q, double im, double re_min, double re_max,
                   double step = 0.01)
      : q_(q), im_(im), step_(step) {
    re_min_ = re_min - 6 * step;
    const int n = int(std::ceil((re_max + 6 * step - re_min_) / step)) + 8;
    vals_.resize(n);
    for (int i = 0; i < n; ++i) vals_[i] = sf::log_phi_b(cplx(re_min_ + i * step, im_), q_);
  }

  cplx operator()(double re) const {
    const double t = (re - re_min_) / step_;
    int i0 = int(std::floor(t)) - 3;
    if (i0 < 0 || i0 > int(vals_.size()) - 8)
      return sf::log_phi_b(cplx(re, im_), q_);  // off-table, evaluate directly
    // 8-point Lagrange around the target
    cplx acc = 0;
    for (int a = 0; a < 8; ++a) {
      double w = 1.0;
      for (int b = 0; b < 8; ++b) {
        if (a == b) continue;
        w *= (t - (i0 + b)) / double(a - b);
      }
      acc += w * vals_[i0 + a];
    }
    return acc;
  }

 private:
  sf::QuantumParams q_;
  double im_, re_min_, step_;
  std::vector<cplx> vals_;
};

inline double kahan_sum(const std::vector<double>& xs) {
  double s = 0, c = 0;
  for (double x : xs) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace detail

/// log of a complex integral accumulated stably: log_value = M + log(sum of
/// exp(g - M)) + dim * log(spacing).
struct QuadratureResult {
  double log_abs = 0;
  cplx log_value;
  double spacing = 0;
  long points = 0;
  double boundary_drop = 0;  // peak minus the largest boundary Re log f
  std::vector<double> half_width;
};

namespace detail {

/// Tensor-product trapezoid over re in prod [-K_j, K_j] of exp(g(re)),
/// with g supplied per grid point. Deterministic fixed-order accumulation.
/// Axes whose boundary faces have not dropped far enough below the peak are
/// widened and the grid recomputed, so sheared integrands whose mass drifts
/// off the coordinate axes are still captured.
template <typename G>
QuadratureResult tensor_quadrature(int dim, std::vector<double> half_width, double h, G&& logf,
                                   double tail_log_eps = -30.0, double hard_cap = 220.0) {
  for (int round = 0;; ++round) {
    std::vector<int> npts(dim);
    std::vector<std::vector<double>> ticks(dim);
    for (int a = 0; a < dim; ++a) {
      const int n = 2 * int(std::ceil(half_width[a] / h)) + 1;
      npts[a] = n;
      ticks[a].resize(n);
      for (int i = 0; i < n; ++i) ticks[a][i] = (i - (n - 1) / 2) * h;
    }
    long total = 1;
    for (int a = 0; a < dim; ++a) total *= npts[a];
    std::vector<cplx> g(total);
    std::vector<int> idx(dim, 0);
    std::vector<double> re(dim);
    double peak = -1e300, boundary = -1e300;
    std::vector<double> face_max(dim, -1e300);
    for (long c = 0; c < total; ++c) {
      bool on_boundary = false;
      for (int a = 0; a < dim; ++a) {
        re[a] = ticks[a][idx[a]];
        on_boundary = on_boundary || idx[a] == 0 || idx[a] == npts[a] - 1;
      }
      g[c] = logf(re);
      peak = std::max(peak, g[c].real());
      if (on_boundary) {
        boundary = std::max(boundary, g[c].real());
        for (int a = 0; a < dim; ++a)
          if (idx[a] == 0 || idx[a] == npts[a] - 1)
            face_max[a] = std::max(face_max[a], g[c].real());
      }
      int a = 0;
      while (a < dim && ++idx[a] == npts[a]) idx[a++] = 0;
    }
    bool hot = false;
    for (int a = 0; a < dim; ++a)
      if (face_max[a] > peak + tail_log_eps + 2.0) {
        half_width[a] *= 1.5;
        hot = true;
      }
    if (hot && round < 8) {
      bool capped = false;
      for (int a = 0; a < dim; ++a) capped = capped || half_width[a] > hard_cap;
      if (!capped) continue;
      throw TailBoundExceeded("tensor_quadrature: boundary stays hot at the width cap");
    }
    if (hot) throw TailBoundExceeded("tensor_quadrature: boundary stays hot after expansion");
    std::vector<double> res(total), ims(total);
    for (long c = 0; c < total; ++c) {
      const double m = std::exp(g[c].real() - peak);
      res[c] = m * std::cos(g[c].imag());
      ims[c] = m * std::sin(g[c].imag());
    }
    const cplx sum(detail::kahan_sum(res), detail::kahan_sum(ims));
    QuadratureResult out;
    out.spacing = h;
    out.points = total;
    out.half_width = half_width;
    out.boundary_drop = peak - boundary;
    out.log_value = cplx(peak, 0.0) + std::log(sum) + double(dim) * std::log(h);
    out.log_abs = out.log_value.real();
    return out;
  }
}

/// Grow per-axis half widths until the boundary integrand has dropped
/// tail_log_eps below the peak along every axis through the center.
template <typename G>
std::vector<double> auto_half_widths(int dim, const QuadratureSpec& spec, G&& logf) {
  std::vector<double> re(dim, 0.0);
  const double g0 = logf(re).real();
  std::vector<double> hw(dim, 1.0);
  for (int a = 0; a < dim; ++a) {
    double k = 1.0;
    for (; k < spec.max_half_width; k *= 1.3) {
      re.assign(dim, 0.0);
      re[a] = k;
      const double gp = logf(re).real();
      re[a] = -k;
      const double gm = logf(re).real();
      if (gp - g0 < spec.tail_log_eps && gm - g0 < spec.tail_log_eps) break;
    }
    if (k >= spec.max_half_width)
      throw TailBoundExceeded("quadrature: integrand tail does not decay within bounds");
    hw[a] = k;
  }
  return hw;
}

}  // namespace detail

/// |Z_hbar| at contour offset v (defaults to the base structure, v = 0),
/// normalized by (1 / 2 pi sqrt(hbar))^{N-2n}; the absolute constant of the
/// reduction is not resolved, so only ratios across hbar are meaningful.
inline QuadratureResult partition_modulus(const PotentialContext& ctx, double lambda, double hbar,
                                          const QuadratureSpec& spec = {},
                                          const VecD* v_opt = nullptr) {
  if (ctx.d > 3) throw DimensionTooLarge("partition_modulus: N - 2n > 3");
  const sf::QuantumParams q(hbar);
  const double scale = 2.0 * std::numbers::pi * std::sqrt(hbar);
  const VecD v = v_opt ? *v_opt : VecD::Zero(ctx.d);
  // one Phi_b table per tetrahedron line
  VecC x0(ctx.d);
  for (int i = 0; i < ctx.d; ++i) x0[i] = cplx(0.0, v[i]);
  const VecC phi0 = ctx.phi(x0);
  auto logf_raw = [&](const std::vector<double>& re) -> cplx {
    VecC x(ctx.d);
    for (int i = 0; i < ctx.d; ++i) x[i] = cplx(re[i], v[i]);
    PotentialValue s = eval_S(ctx, x, cplx(0.0, lambda), false);
    cplx g = s.alg / (2.0 * std::numbers::pi * hbar);
    for (int k = 0; k < ctx.N; ++k) g -= sf::log_phi_b(s.phi[k] / scale, q);
    return g;
  };
  const std::vector<double> hw = detail::auto_half_widths(ctx.d, spec, logf_raw);
  // now build the tables over the needed ranges
  std::vector<detail::FaddeevLineTable> tables;
  tables.reserve(ctx.N);
  for (int k = 0; k < ctx.N; ++k) {
    double reach = 0;
    for (int i = 0; i < ctx.d; ++i) reach += std::abs(ctx.Pt(k, i)) * hw[i];
    tables.emplace_back(q, phi0[k].imag() / scale, -reach / scale - 0.1, reach / scale + 0.1);
  }
  auto logf = [&](const std::vector<double>& re) -> cplx {
    VecC x(ctx.d);
    for (int i = 0; i < ctx.d; ++i) x[i] = cplx(re[i], v[i]);
    PotentialValue s = eval_S(ctx, x, cplx(0.0, lambda), false);
    cplx g = s.alg / (2.0 * std::numbers::pi * hbar);
    for (int k = 0; k < ctx.N; ++k) g -= tables[k](s.phi[k].real() / scale);
    return g;
  };
  const double h = spec.spacing_factor * std::sqrt(hbar);
  QuadratureResult r = detail::tensor_quadrature(ctx.d, hw, h, logf);
  const double norm = double(ctx.d) * std::log(1.0 / scale);
  r.log_abs += norm;
  r.log_value += norm;
  return r;
}

/// The Jones integrand at fixed w: a (d-1)-dimensional fiber integral on
/// the horizontal contour through iv_hat, normalized so the Laplace
/// identity against partition_modulus holds exactly.
inline QuadratureResult jones_value(const PotentialContext& ctx, double hbar, cplx w,
                                    const QuadratureSpec& spec = {},
                                    const VecD* vhat_opt = nullptr) {
  if (ctx.d - 1 > 2) throw DimensionTooLarge("jones_value: N - 2n - 1 > 2");
  const sf::QuantumParams q(hbar);
  const double scale = 2.0 * std::numbers::pi * std::sqrt(hbar);
  VecD vhat = VecD::Zero(ctx.d - 1);
  if (vhat_opt) {
    vhat = *vhat_opt;
  } else {
    // center the contour on the fiber critical point when it is reachable
    // and keeps all strip variables inside the closed horizontal band
    try {
      JonesValue crit = solve_jones_fiber(ctx, w, VecC::Zero(ctx.d - 1));
      const VecC phi_c = ctx.phi(crit.x);
      bool in_band = true;
      for (int k = 0; k < ctx.N; ++k)
        in_band = in_band && phi_c[k].imag() > -std::numbers::pi + 1e-9 &&
                  phi_c[k].imag() < -1e-9;
      if (in_band) {
        int h = 0;
        for (int i = 0; i < ctx.d; ++i) {
          if (i == ctx.pivot_var) continue;
          vhat[h++] = crit.x[i].imag();
        }
      }
    } catch (const std::exception&) {
      vhat.setZero();
    }
  }
  auto logf = [&](const std::vector<double>& re) -> cplx {
    VecC xhat(ctx.d - 1);
    for (int i = 0; i < ctx.d - 1; ++i) xhat[i] = cplx(re[i], vhat[i]);
    JonesValue jv = eval_J(ctx, w, xhat, false);
    cplx g = jv.alg / (2.0 * std::numbers::pi * hbar);
    const VecC phi = ctx.phi(jv.x);
    for (int k = 0; k < ctx.N; ++k) g -= sf::log_phi_b(phi[k] / scale, q);
    return g;
  };
  QuadratureResult r;
  if (ctx.d == 1) {
    // no fiber integral: the value is the integrand itself
    r.log_value = logf({});
    r.log_abs = r.log_value.real();
    r.points = 1;
  } else {
    const std::vector<double> hw = detail::auto_half_widths(ctx.d - 1, spec, logf);
    const double h = spec.spacing_factor * std::sqrt(hbar);
    r = detail::tensor_quadrature(ctx.d - 1, hw, h, logf);
  }
  const double norm =
      double(ctx.d) * std::log(1.0 / scale) - std::log(std::abs(ctx.cvec[ctx.pivot_var]));
  r.log_abs += norm;
  r.log_value += norm;
  return r;
}

/// Recomputes |Z| through the Laplace transform of the Jones integrand: a
/// sheared quadrature over (Re w, Re x_hat) on the lines Im w = mu(alpha),
/// Im x_hat = 0, normalized identically to partition_modulus. Returns
/// log | integral J(hbar, w) e^{w lambda / 4 pi hbar} dw |.
inline double laplace_transform_log_abs(const PotentialContext& ctx, double hbar, double lambda,
                                        double mu, const QuadratureSpec& spec = {}) {
  const sf::QuantumParams q(hbar);
  const double scale = 2.0 * std::numbers::pi * std::sqrt(hbar);
  const int dim = ctx.d;  // one w direction + (d-1) fiber directions
  auto lift = [&](const std::vector<double>& re) {
    VecC xhat(ctx.d - 1);
    for (int i = 0; i < ctx.d - 1; ++i) xhat[i] = cplx(re[1 + i], 0.0);
    return lift_jones(ctx, cplx(re[0], mu), xhat);
  };
  auto logf_raw = [&](const std::vector<double>& re) -> cplx {
    const VecC x = lift(re);
    PotentialValue s = eval_S(ctx, x, cplx(0.0), false);
    cplx g = s.alg / (2.0 * std::numbers::pi * hbar);
    for (int k = 0; k < ctx.N; ++k) g -= sf::log_phi_b(s.phi[k] / scale, q);
    g += cplx(re[0], mu) * lambda / (4.0 * std::numbers::pi * hbar);
    return g;
  };
  std::vector<double> hw = detail::auto_half_widths(dim, spec, logf_raw);
  // tables over generous ranges; tensor_quadrature may still widen axes
  const double reach_cap = 2.5;
  std::vector<detail::FaddeevLineTable> tables;
  tables.reserve(ctx.N);
  std::vector<double> zero(dim, 0.0);
  const VecC phi0 = ctx.phi(lift(zero));
  std::vector<double> reach(ctx.N, 0.1);
  {
    // bound |Re phi_k| over the (expanded) box through the affine lift
    std::vector<double> probe(dim);
    for (int corner = 0; corner < (1 << dim); ++corner) {
      for (int a = 0; a < dim; ++a)
        probe[a] = ((corner >> a) & 1 ? 1.0 : -1.0) * hw[a] * reach_cap;
      const VecC x = lift(probe);
      const VecC phi = ctx.phi(x);
      for (int k = 0; k < ctx.N; ++k)
        reach[k] = std::max(reach[k], std::abs(phi[k].real()) + 0.2);
    }
  }
  for (int k = 0; k < ctx.N; ++k)
    tables.emplace_back(q, phi0[k].imag() / scale, -reach[k] / scale, reach[k] / scale);
  auto logf = [&](const std::vector<double>& re) -> cplx {
    const VecC x = lift(re);
    PotentialValue s = eval_S(ctx, x, cplx(0.0), false);
    cplx g = s.alg / (2.0 * std::numbers::pi * hbar);
    for (int k = 0; k < ctx.N; ++k) g -= tables[k](s.phi[k].real() / scale);
    g += cplx(re[0], mu) * lambda / (4.0 * std::numbers::pi * hbar);
    return g;
  };
  const double h = spec.spacing_factor * std::sqrt(hbar);
  QuadratureResult r =
      detail::tensor_quadrature(dim, hw, h, logf, spec.tail_log_eps, reach_cap * 100.0);
  return r.log_abs + double(ctx.d) * std::log(1.0 / scale) -
         std::log(std::abs(ctx.cvec[ctx.pivot_var]));
}

/// Fit of 2 pi hbar log|value| against a small asymptotic basis; the
/// constant term estimates the limit (minus a volume).
struct AsymptoticFit {
  std::vector<double> hbars;
  std::vector<double> log_values;
  double slope = 0;        // extrapolated constant term of 2 pi hbar log|v|
  double slope_error = 0;  // change when the coarsest sample is dropped
  std::vector<double> prefactor_ratio;  // |v| e^{-slope/(2 pi hbar)} per sample
  double prefactor_drift = 0;           // max relative variation of the ratios
};

namespace detail {

inline std::vector<double> lsq_fit(const std::vector<std::vector<double>>& basis,
                                   const std::vector<double>& y) {
  const int nb = int(basis.size());
  const int n = int(y.size());
  Eigen::MatrixXd a(n, nb);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    rhs[i] = y[i];
    for (int j = 0; j < nb; ++j) a(i, j) = basis[j][i];
  }
  Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
  std::vector<double> out(nb);
  for (int j = 0; j < nb; ++j) out[j] = sol[j];
  return out;
}

}  // namespace detail

/// samples: (hbar, log|value|), at least four. with_hlogh adds an
/// hbar*log(hbar) basis element (present for the Jones normalization).
inline AsymptoticFit volume_slope_fit(const std::vector<std::pair<double, double>>& samples,
                                      bool with_hlogh = false) {
  if (samples.size() < 4) throw InsufficientSamples("volume_slope_fit: need >= 4 samples");
  AsymptoticFit fit;
  for (const auto& [hb, lv] : samples) {
    fit.hbars.push_back(hb);
    fit.log_values.push_back(lv);
  }
  auto run = [&](int skip) {
    std::vector<double> y;
    std::vector<std::vector<double>> basis(3);
    for (size_t i = 0; i < samples.size(); ++i) {
      if (int(i) == skip) continue;
      const double hb = samples[i].first;
      y.push_back(2.0 * std::numbers::pi * hb * samples[i].second);
      basis[0].push_back(1.0);
      basis[1].push_back(hb);
      basis[2].push_back(with_hlogh ? hb * std::log(hb) : hb * hb);
    }
    return detail::lsq_fit(basis, y)[0];
  };
  fit.slope = run(-1);
  // drop the coarsest (largest) hbar for the error estimate
  int coarsest = 0;
  for (size_t i = 1; i < samples.size(); ++i)
    if (samples[i].first > samples[coarsest].first) coarsest = int(i);
  fit.slope_error = std::abs(fit.slope - run(coarsest));
  for (size_t i = 0; i < samples.size(); ++i)
    fit.prefactor_ratio.push_back(
        std::exp(samples[i].second - fit.slope / (2.0 * std::numbers::pi * samples[i].first)));
  double lo = fit.prefactor_ratio[0], hi = fit.prefactor_ratio[0];
  for (double rr : fit.prefactor_ratio) {
    lo = std::min(lo, rr);
    hi = std::max(hi, rr);
  }
  fit.prefactor_drift = (hi - lo) / (0.5 * (hi + lo));
  return fit;
}

/// Checkable saddle-point hypotheses at desk scale.
struct SaddleDiagnostics {
  double grad_norm = 0;          // |grad S~| at the critical point
  bool critical_on_contour = false;
  bool strict_max_on_contour = false;
  double hess_det_abs = 0;
  double hess_condition = 0;
  double prefactor_abs = 0;  // |h(y^c)|
  bool pass() const {
    return grad_norm < 1e-8 && critical_on_contour && strict_max_on_contour &&
           hess_det_abs > 0 && prefactor_abs > 0;
  }
};

inline SaddleDiagnostics saddle_diagnostics(const PotentialContext& ctx,
                                            const ShapeAssignment& shapes, double lambda,
                                            double scan_half_width = 3.0, int scan_points = 21) {
  SaddleDiagnostics d;
  const VecC xc = x_from_shapes(ctx, shapes);
  PotentialValue s = eval_S(ctx, xc, cplx(0.0, lambda));
  d.grad_norm = s.grad.norm();
  Eigen::JacobiSVD<MatC> svd(s.hess);
  d.hess_det_abs = std::abs(Eigen::PartialPivLU<MatC>(s.hess).determinant());
  d.hess_condition = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  d.prefactor_abs = std::abs(h_function(s.phi, ctx.delta));
  // contour through the critical point: horizontal plane at Im x^c
  VecD v(ctx.d);
  for (int i = 0; i < ctx.d; ++i) v[i] = xc[i].imag();
  d.critical_on_contour = true;
  const double smax = s.value.real();
  d.strict_max_on_contour = true;
  std::vector<int> idx(ctx.d, 0);
  for (;;) {
    VecC x(ctx.d);
    double dist = 0;
    for (int i = 0; i < ctx.d; ++i) {
      const double re =
          xc[i].real() - scan_half_width + 2.0 * scan_half_width * idx[i] / (scan_points - 1);
      x[i] = cplx(re, v[i]);
      dist = std::max(dist, std::abs(re - xc[i].real()));
    }
    if (dist > 1e-6) {
      try {
        PotentialValue sv = eval_S(ctx, x, cplx(0.0, lambda));
        if (sv.value.real() >= smax) d.strict_max_on_contour = false;
      } catch (const CutProximity&) {
        // a guarded point on the scan grid is not a failure of the maximum
      }
    }
    int a = 0;
    while (a < ctx.d && ++idx[a] == scan_points) idx[a++] = 0;
    if (a == ctx.d) break;
  }
  return d;
}

}  // namespace famed
