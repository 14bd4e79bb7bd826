#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace famed::sf {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

struct OnBranchCut : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooCloseToCut : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PoleProximity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// B_k / (k+1)! for the expansion Li2(z) = sum_k B_k u^{k+1}/(k+1)!,
// u = -Log(1-z). Odd entries beyond B_1 vanish.
inline const std::vector<double>& li2_series_coeffs() {
  static const std::vector<double> c = [] {
    // Bernoulli numbers B_0..B_30 (even ones), B_1 = -1/2.
    const double bern[] = {1.0,
                           -0.5,
                           1.0 / 6,
                           0.0,
                           -1.0 / 30,
                           0.0,
                           1.0 / 42,
                           0.0,
                           -1.0 / 30,
                           0.0,
                           5.0 / 66,
                           0.0,
                           -691.0 / 2730,
                           0.0,
                           7.0 / 6,
                           0.0,
                           -3617.0 / 510,
                           0.0,
                           43867.0 / 798,
                           0.0,
                           -174611.0 / 330,
                           0.0,
                           854513.0 / 138,
                           0.0,
                           -236364091.0 / 2730,
                           0.0,
                           8553103.0 / 6,
                           0.0,
                           -23749461029.0 / 870,
                           0.0,
                           8615841276005.0 / 14322};
    std::vector<double> v(31);
    double fact = 1.0;  // (k+1)!
    for (int k = 0; k <= 30; ++k) {
      fact *= (k + 1);
      v[k] = bern[k] / fact;
    }
    return v;
  }();
  return c;
}

/// Li2 via the Bernoulli series in u = -Log(1-z); accurate for |u| < ~2.
inline cplx li2_u_series(cplx z) {
  const cplx u = -std::log(1.0 - z);
  const auto& c = li2_series_coeffs();
  cplx sum = 0.0, upow = u;
  for (size_t k = 0; k < c.size(); ++k) {
    if (c[k] != 0.0) sum += c[k] * upow;
    upow *= u;
  }
  return sum;
}

/// |z| <= 1 region, reflected so the series argument stays small.
inline cplx li2_unit(cplx z) {
  if (z == cplx(1.0, 0.0)) return cplx(kPi * kPi / 6, 0.0);
  if (z.real() > 0.5) {
    return cplx(kPi * kPi / 6, 0.0) - std::log(z) * std::log(1.0 - z) - li2_u_series(1.0 - z);
  }
  return li2_u_series(z);
}

}  // namespace detail

/// Principal-branch dilogarithm on the plane cut along [1, oo).
inline cplx li2(cplx z) {
  if (z.imag() == 0.0 && z.real() >= 1.0) throw OnBranchCut("li2: argument on [1,inf)");
  if (std::abs(z) <= 1.0) return detail::li2_unit(z);
  // inversion relation: Li2(z) = -Li2(1/z) - pi^2/6 - Log(-z)^2 / 2
  const cplx inv = detail::li2_unit(1.0 / z);
  const cplx lm = std::log(-z);
  return -inv - cplx(kPi * kPi / 6, 0.0) - 0.5 * lm * lm;
}

/// Boundary values Li2(x + side*i0) for real x > 1.
inline cplx li2_real_side(double x, int side) {
  if (x <= 1.0) return li2(cplx(x, 0.0));
  const cplx inv = detail::li2_unit(cplx(1.0 / x, 0.0));
  const cplx lm(std::log(x), side < 0 ? kPi : -kPi);  // Log(-z), z = x -+ i0
  return -inv - cplx(kPi * kPi / 6, 0.0) - 0.5 * lm * lm;
}

/// Bloch--Wigner function, continuous on C and zero on the reals.
inline double bloch_wigner(cplx z) {
  if (z.imag() == 0.0) return 0.0;
  return std::imag(li2(z)) + std::arg(1.0 - z) * std::log(std::abs(z));
}

namespace detail {

// In-strip value L(y) = Li2(-e^y) for Im y in [-pi, pi), with the correct
// side of the dilogarithm cut on the flat boundary Im y = -pi.
inline cplx strip_L(cplx y) {
  if (y.imag() == -kPi) {
    const double x = y.real();
    if (x == 0.0) return cplx(kPi * kPi / 6, 0.0);
    if (x < 0.0) return li2(cplx(std::exp(x), 0.0));
    return li2_real_side(std::exp(x), +1);  // approached from Im y > -pi
  }
  return li2(-std::exp(y));
}

inline cplx strip_Lp(cplx y) {
  // L'(y) = -Log(1+e^y); on Im y = -pi with Re y > 0 the argument crosses
  // the negative reals and the limit from inside the strip has arg -> -pi.
  if (y.imag() == -kPi) {
    const double x = y.real();
    const double m = 1.0 - std::exp(x);
    if (m > 0.0) return -std::log(cplx(m, 0.0));
    if (m == 0.0) throw TooCloseToCut("L': branch point");
    return -cplx(std::log(-m), -kPi);
  }
  return -std::log(1.0 + std::exp(y));
}

}  // namespace detail

/// Distance from y to the two vertical cuts i(-oo,-pi) and i(pi,oo).
inline double cut_distance(cplx y) {
  const double ay = std::abs(y.imag());
  if (ay <= kPi) return std::hypot(y.real(), kPi - ay);
  return std::abs(y.real());
}

/// Analytic continuation L of Li2(-e^y) to the cut plane: 2 pi i periodic
/// for Re y < 0 and satisfying L(y + 2 pi i) = L(y) - 2 pi i (y + i pi) for
/// Re y > 0.
inline cplx cont_L(cplx y, double delta = 1e-3) {
  if (std::abs(y.imag()) > kPi && std::abs(y.real()) < delta)
    throw TooCloseToCut("cont_L: within delta of a cut");
  const long k = long(std::floor((y.imag() + kPi) / (2 * kPi)));
  const cplx y0 = y - cplx(0.0, 2 * kPi * double(k));
  cplx val = detail::strip_L(y0);
  if (k == 0 || y.real() < 0.0) return val;
  if (y.real() == 0.0) throw TooCloseToCut("cont_L: on a cut");
  cplx w = y0;
  if (k > 0) {
    for (long j = 0; j < k; ++j) {
      val -= cplx(0.0, 2 * kPi) * (w + cplx(0.0, kPi));
      w += cplx(0.0, 2 * kPi);
    }
  } else {
    for (long j = 0; j < -k; ++j) {
      w -= cplx(0.0, 2 * kPi);
      val += cplx(0.0, 2 * kPi) * (w + cplx(0.0, kPi));
    }
  }
  return val;
}

/// Continuation of L'(y) = -Log(1+e^y): periodic left of the cuts and
/// dropping by 2 pi i per sheet on the right.
inline cplx cont_L_prime(cplx y, double delta = 1e-3) {
  if (std::abs(y.imag()) > kPi && std::abs(y.real()) < delta)
    throw TooCloseToCut("cont_L_prime: within delta of a cut");
  const long k = long(std::floor((y.imag() + kPi) / (2 * kPi)));
  const cplx y0 = y - cplx(0.0, 2 * kPi * double(k));
  cplx val = detail::strip_Lp(y0);
  if (k == 0 || y.real() < 0.0) return val;
  if (y.real() == 0.0) throw TooCloseToCut("cont_L_prime: on a cut");
  return val - cplx(0.0, 2 * kPi * double(k));
}

/// L''(y) = -1/(1+e^{-y}), already single valued.
inline cplx cont_L_pp(cplx y) { return -1.0 / (1.0 + std::exp(-y)); }

/// hbar > 0 and the matching b in (0,1] with (b + 1/b) sqrt(hbar) = 1.
struct QuantumParams {
  double hbar;
  double b;
  explicit QuantumParams(double hbar_) : hbar(hbar_) {
    if (!(hbar > 0) || hbar > 0.25)
      throw std::domain_error("QuantumParams: need 0 < hbar <= 1/4");
    const double s = 1.0 / std::sqrt(hbar);
    b = (s - std::sqrt(s * s - 4.0)) / 2.0;
  }
  static QuantumParams from_b(double b_) {
    QuantumParams q(1.0 / ((b_ + 1.0 / b_) * (b_ + 1.0 / b_)));
    q.b = b_ <= 1.0 ? b_ : 1.0 / b_;
    return q;
  }
  double strip_half_height() const { return (b + 1.0 / b) / 2.0; }
};

namespace detail {

inline cplx log1pexp(cplx u) {
  // log(1 + e^u), stable for large |Re u|
  if (u.real() > 0.0) return u + std::log(1.0 + std::exp(-u));
  return std::log(1.0 + std::exp(u));
}

inline const std::vector<std::pair<double, double>>& gl16() {
  // 16-point Gauss-Legendre nodes/weights on [-1, 1]
  static const std::vector<std::pair<double, double>> nw = {
      {-0.9894009349916499, 0.0271524594117541}, {-0.9445750230732326, 0.0622535239386479},
      {-0.8656312023878318, 0.0951585116824928}, {-0.7554044083550030, 0.1246289712555339},
      {-0.6178762444026438, 0.1495959888165767}, {-0.4580167776572274, 0.1691565193950025},
      {-0.2816035507792589, 0.1826034150449236}, {-0.0950125098376374, 0.1894506104550685},
      {0.0950125098376374, 0.1894506104550685},  {0.2816035507792589, 0.1826034150449236},
      {0.4580167776572274, 0.1691565193950025},  {0.6178762444026438, 0.1495959888165767},
      {0.7554044083550030, 0.1246289712555339},  {0.8656312023878318, 0.0951585116824928},
      {0.9445750230732326, 0.0622535239386479},  {0.9894009349916499, 0.0271524594117541}};
  return nw;
}

}  // namespace detail

/// Log of Faddeev's quantum dilogarithm via its defining contour integral,
/// valid inside the strip |Im z| < (b + 1/b)/2. The real line is indented
/// around 0 by an upper semicircle small enough to stay below the first
/// poles of the integrand at i pi b and i pi / b.
inline cplx log_phi_b_integral(cplx z, const QuantumParams& q) {
  const double b = q.b;
  const double gammaR = (b + 1.0 / b) - 2.0 * z.imag();
  const double gammaL = (b + 1.0 / b) + 2.0 * z.imag();
  if (gammaR < 0.05 || gammaL < 0.05)
    throw PoleProximity("log_phi_b: argument too close to the strip boundary");
  auto f = [&](cplx w) -> cplx {
    return std::exp(cplx(0.0, -2.0) * z * w) / (4.0 * w * std::sinh(b * w) * std::sinh(w / b));
  };
  const double r0 = 0.5 * std::min(1.0, kPi * std::min(b, 1.0 / b));
  const double WR = std::max(40.0 / gammaR, r0 * 2.0);
  const double WL = std::max(40.0 / gammaL, r0 * 2.0);
  const double panel = std::min(0.5, 6.0 / (2.0 * std::abs(z) + b + 1.0 / b + 1.0));
  cplx sum = 0.0;
  auto ray = [&](double a0, double a1) {  // straight piece from a0 to a1 on the real axis
    const int n = std::max(1, int(std::ceil(std::abs(a1 - a0) / panel)));
    const double hseg = (a1 - a0) / n;
    for (int i = 0; i < n; ++i) {
      const double mid = a0 + (i + 0.5) * hseg;
      for (const auto& [x, wgt] : detail::gl16())
        sum += wgt * 0.5 * hseg * f(cplx(mid + 0.5 * hseg * x, 0.0));
    }
  };
  ray(-WL, -r0);
  ray(r0, WR);
  // semicircle w = r0 e^{i theta}, theta from pi to 0
  const int arcs = 4;
  for (int i = 0; i < arcs; ++i) {
    const double t0 = kPi - i * (kPi / arcs), t1 = kPi - (i + 1) * (kPi / arcs);
    const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
    for (const auto& [x, wgt] : detail::gl16()) {
      const double th = mid + half * x;
      const cplx w = r0 * std::exp(cplx(0.0, th));
      sum += wgt * half * f(w) * cplx(0.0, 1.0) * w;
    }
  }
  return sum;
}

/// Log Phi_b on all of C minus the poles. Arguments far to the right are
/// routed through the inversion relation, whose quadratic part is handled
/// symbolically (the defining integral cancels catastrophically there),
/// and the shift functional equation walks the rest back into the strip.
inline cplx log_phi_b(cplx z, const QuantumParams& q) {
  if (z.real() > 1.0) {
    const cplx i(0.0, 1.0);
    return i * kPi / 12.0 * (q.b * q.b + 1.0 / (q.b * q.b)) + i * kPi * z * z -
           log_phi_b(-z, q);
  }
  const double ymax = 0.42 * (q.b + 1.0 / q.b);
  cplx extra = 0.0;
  int guard = 0;
  while (std::abs(z.imag()) > ymax) {
    if (++guard > 100000) throw PoleProximity("log_phi_b: shift did not terminate");
    // largest of the two shifts that does not overshoot the far strip edge
    const double big = 1.0 / q.b;
    const double s = (std::abs(z.imag()) - big > -ymax) ? big : q.b;
    if (z.imag() > 0) {
      // Phi(z) = Phi(z - i s) / (1 + e^{2 pi s (z - i s / 2)})
      extra -= detail::log1pexp(2.0 * kPi * s * (z - cplx(0.0, 0.5 * s)));
      z -= cplx(0.0, s);
    } else {
      extra += detail::log1pexp(2.0 * kPi * s * (z + cplx(0.0, 0.5 * s)));
      z += cplx(0.0, s);
    }
  }
  return extra + log_phi_b_integral(z, q);
}

inline cplx phi_b(cplx z, const QuantumParams& q) { return std::exp(log_phi_b(z, q)); }

/// |Log Phi_b(z / 2 pi b) + (i / 2 pi b^2) L(z)|, the uniform semiclassical
/// defect which is O(b^2) away from the cuts.
inline double phi_semiclassical_residual_b(cplx z, const QuantumParams& q, double delta = 1e-3) {
  const cplx lhs = log_phi_b(z / (2.0 * kPi * q.b), q);
  const cplx rhs = -cplx(0.0, 1.0) / (2.0 * kPi * q.b * q.b) * cont_L(z, delta);
  return std::abs(lhs - rhs);
}

/// Defect of the hbar-form expansion with the first-order correction terms
/// -(i z / 2 pi) L'(z) + (i / pi) L(z) - (i / 2 pi hbar) L(z).
inline double phi_semiclassical_residual_hbar(cplx z, const QuantumParams& q,
                                              double delta = 1e-3) {
  const cplx lhs = log_phi_b(z / (2.0 * kPi * std::sqrt(q.hbar)), q);
  const cplx i(0.0, 1.0);
  const cplx rhs = -i * z / (2.0 * kPi) * cont_L_prime(z, delta) + i / kPi * cont_L(z, delta) -
                   i / (2.0 * kPi * q.hbar) * cont_L(z, delta);
  return std::abs(lhs - rhs);
}

}  // namespace famed::sf
