#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

#include "famed/geometry.hpp"
#include "famed/nz_data.hpp"

namespace famed {

struct SingularShape : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Which matrix plays B in the determinant. The gluing-equation convention
/// B = G'' - G' is the default; the variant B = G'' - G appears in one
/// statement of the definition and is kept behind a flag so the two can be
/// compared numerically.
enum class OneLoopConvention { GppMinusGp, GppMinusG };

/// det-based invariant, defined up to sign; the modulus is canonical.
struct OneLoopValue {
  cplx tau;
  OneLoopConvention convention;
};

inline OneLoopValue one_loop_invariant(const ShapeAssignment& s, const GluingMatrices& gm,
                                       const Flattening& fl,
                                       OneLoopConvention conv = OneLoopConvention::GppMinusGp) {
  const int n = gm.N();
  if (s.size() != n || fl.size() != n)
    throw std::invalid_argument("one_loop_invariant: size mismatch");
  for (int k = 0; k < n; ++k)
    if (std::abs(s.z(k)) < 1e-12 || std::abs(s.z(k) - 1.0) < 1e-12)
      throw SingularShape("one_loop_invariant: degenerate shape");
  const RationalMatrix a_q = gm.G - gm.Gp;
  const RationalMatrix b_q = conv == OneLoopConvention::GppMinusGp ? gm.Gpp - gm.Gp
                                                                   : gm.Gpp - gm.G;
  MatC m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = a_q(i, j).to_double() * s.zpp(j) + b_q(i, j).to_double() / s.z(j);
  cplx det = Eigen::PartialPivLU<MatC>(m).determinant();
  cplx weight = 1.0;
  for (int k = 0; k < n; ++k)
    weight *= std::pow(s.z(k), double(fl.fpp[k].to_long())) *
              std::pow(s.zpp(k), -double(fl.f[k].to_long()));
  return OneLoopValue{0.5 * det * weight, conv};
}

/// Modulus-level change-of-curve consistency: compares |tau_m| with
/// |dw_m/dw_l| |tau_l| using a finite-difference transition derivative read
/// off a meridian deformation path.
inline double change_of_curve_residual(const DeformationPath& meridian_path, cplx tau_l,
                                       cplx tau_m) {
  if (std::abs(tau_m) == 0.0 || std::abs(tau_l) == 0.0)
    throw std::invalid_argument("change_of_curve_residual: vanishing invariant");
  if (meridian_path.t.size() < 3)
    throw std::invalid_argument("change_of_curve_residual: path too short");
  // centered derivative of w_l(w_m) at 0 from the first symmetric samples,
  // via one-sided Richardson when the path only marches forward
  const cplx w1 = meridian_path.t[1], w2 = meridian_path.t[2];
  const cplx l1 = meridian_path.w_other[1] - meridian_path.w_other[0];
  const cplx l2 = meridian_path.w_other[2] - meridian_path.w_other[0];
  // f'(0) ~ (4 f(h) - f(2h)) / (2h) with f(0) = 0 shifts removed
  const cplx dwl_dwm = (4.0 * l1 - l2) / (2.0 * w1);
  (void)w2;
  const double dwm_dwl = 1.0 / std::abs(dwl_dwm);
  return std::abs(std::abs(tau_m) - dwm_dwl * std::abs(tau_l)) / std::abs(tau_m);
}

}  // namespace famed
