#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "trivar/analytic.hpp"
#include "trivar/types.hpp"

namespace trivar {

// ---------------------------------------------------------------------------
// rotations

/// Counterclockwise rotation about the z axis.
inline Mat3 rot_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

/// Counterclockwise rotation about the x axis.
inline Mat3 rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {{{1.0, 0.0, 0.0}, {0.0, c, -s}, {0.0, s, c}}};
}

inline bool is_proper_rotation(const Mat3& r, double tol = 1e-10) {
  const Mat3 g = transpose(r) * r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(g[i][j] - (i == j ? 1.0 : 0.0)) > tol) return false;
  return std::abs(det(r) - 1.0) <= tol;
}

inline RealSignal3 rotate_frame(const RealSignal3& x, const Mat3& r) {
  if (!is_proper_rotation(r)) throw InputError("rotate_frame: matrix is not a proper rotation");
  std::vector<Vec3> out(x.size());
  const Vec3& mean = x.removed_mean();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Vec3 v{x[i][0] + mean[0], x[i][1] + mean[1], x[i][2] + mean[2]};
    out[i] = r * v;
  }
  return RealSignal3(std::move(out), x.dt());
}

inline AnalyticSignal3 rotate_frame(const AnalyticSignal3& x, const Mat3& r) {
  if (!is_proper_rotation(r)) throw InputError("rotate_frame: matrix is not a proper rotation");
  AnalyticSignal3 out{std::vector<CVec3>(x.size()), x.dt};
  for (std::size_t i = 0; i < x.size(); ++i) out.samples[i] = r * x.samples[i];
  return out;
}

// ---------------------------------------------------------------------------
// parameter types

/// One instant of the modulated ellipse. Angles may be given on any branch;
/// extraction reports principal values and unwrapped tracks separately.
struct EllipseState {
  double a = 0.0;       // semi-major axis
  double b = 0.0;       // semi-minor axis
  double kappa = 0.0;   // RMS amplitude sqrt((a^2+b^2)/2)
  double lambda = 0.0;  // linearity (a^2-b^2)/(a^2+b^2)
  double theta = 0.0;   // precession angle
  double phi = 0.0;     // orbital phase
  double alpha = 0.0;   // azimuth of the normal
  double beta = 0.0;    // zenith of the normal

  static EllipseState from_axes(double a, double b, double theta, double phi, double alpha,
                                double beta) {
    EllipseState s{a, b, 0.0, 0.0, theta, phi, alpha, beta};
    s.kappa = std::sqrt((a * a + b * b) / 2.0);
    s.lambda = (a * a + b * b) > 0.0 ? (a * a - b * b) / (a * a + b * b) : 0.0;
    return s;
  }

  static EllipseState from_shape(double kappa, double lambda, double theta, double phi,
                                 double alpha, double beta) {
    return EllipseState{kappa * std::sqrt(1.0 + lambda),
                        kappa * std::sqrt(1.0 - lambda),
                        kappa,
                        lambda,
                        theta,
                        phi,
                        alpha,
                        beta};
  }
};

/// Struct-of-arrays time series of extracted ellipse parameters.
struct EllipseSeries {
  std::vector<double> a, b, kappa, lambda;
  std::vector<double> theta, phi, alpha, beta;  // principal values
  std::vector<double> theta_unwrapped, phi_unwrapped, alpha_unwrapped;
  Flags flags;
  double dt = 1.0;

  std::size_t size() const { return kappa.size(); }

  EllipseState state(std::size_t i) const {
    return EllipseState{a[i],          b[i],         kappa[i],           lambda[i],
                        theta_unwrapped[i], phi_unwrapped[i], alpha_unwrapped[i], beta[i]};
  }
};

/// Time series of the six rates of change, in radians (or 1) per unit time.
struct EllipseRates {
  std::vector<double> dkappa_rel;   // kappa'/kappa
  std::vector<double> dlambda;      // lambda'
  std::vector<double> omega_phi;    // orbital frequency
  std::vector<double> omega_theta;  // internal precession
  std::vector<double> omega_alpha;  // external precession
  std::vector<double> omega_beta;   // nutation
  Flags flags;

  std::size_t size() const { return omega_phi.size(); }
};

struct NormalSeries {
  std::vector<Vec3> n;      // Im{x+} x Re{x+}, magnitude a*b
  std::vector<Vec3> n_hat;  // unit normal; held from the last good sample where degenerate
  std::vector<double> mag;
  std::vector<bool> degenerate;

  std::size_t size() const { return n.size(); }
};

/// In-plane 2-vector and its rotary (counterclockwise, clockwise) form.
struct PlanarProjection {
  std::vector<CVec2> x_tilde;
  std::vector<CVec2> z_tilde;
};

struct EllipseDecomposition {
  EllipseSeries states;
  NormalSeries normals;
  PlanarProjection planar;
};

struct ExtractOptions {
  /// ||n|| < eps_lin * kappa^2 marks the plane as undefined.
  double eps_lin = 1e-6;
  /// lambda below this marks theta/phi as inseparable.
  double eps_indeterminate = 1e-6;
};

// ---------------------------------------------------------------------------
// synthesis

/// exp(i phi) J3(alpha) J1(beta) J3(theta) [a, -i b, 0]^T
inline CVec3 ellipse_sample(const EllipseState& s) {
  const double ct = std::cos(s.theta), st = std::sin(s.theta);
  // J3(theta) [a, -ib, 0]
  const CVec3 v{cplx(s.a * ct, s.b * st), cplx(s.a * st, -s.b * ct), 0.0};
  const CVec3 w = (rot_z(s.alpha) * rot_x(s.beta)) * v;
  const cplx rot = std::polar(1.0, s.phi);
  return {rot * w[0], rot * w[1], rot * w[2]};
}

inline AnalyticSignal3 ellipse_synthesize(std::span<const EllipseState> states, double dt = 1.0) {
  AnalyticSignal3 out{std::vector<CVec3>(states.size()), dt};
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    if (!(s.b >= 0.0) || !(s.a >= s.b))
      throw InputError("ellipse_synthesize: need a >= b >= 0 at sample " + std::to_string(i));
    out.samples[i] = ellipse_sample(s);
  }
  return out;
}

inline AnalyticSignal3 ellipse_synthesize(const std::vector<EllipseState>& states, double dt = 1.0) {
  return ellipse_synthesize(std::span<const EllipseState>(states), dt);
}

// ---------------------------------------------------------------------------
// recovery

inline NormalSeries normal_vector(const AnalyticSignal3& xp, double eps_lin = 1e-6) {
  const std::size_t n = xp.size();
  NormalSeries out;
  out.n.resize(n);
  out.n_hat.resize(n);
  out.mag.resize(n);
  out.degenerate.assign(n, false);

  std::size_t first_good = n;
  for (std::size_t i = 0; i < n; ++i) {
    const CVec3& x = xp.samples[i];
    out.n[i] = cross(imag_part(x), real_part(x));
    out.mag[i] = norm(out.n[i]);
    const double kappa2 = norm2(x) / 2.0;
    out.degenerate[i] = !(kappa2 > 0.0) || out.mag[i] < eps_lin * kappa2;
    if (!out.degenerate[i]) {
      out.n_hat[i] = scaled(out.n[i], 1.0 / out.mag[i]);
      if (first_good == n) first_good = i;
    }
  }

  Vec3 held = first_good < n ? out.n_hat[first_good] : Vec3{0.0, 0.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    if (out.degenerate[i])
      out.n_hat[i] = held;
    else
      held = out.n_hat[i];
  }
  return out;
}

/// Recovers the canonical ellipse parameters, the normal vector and the
/// planar/rotary projections from an analytic 3-vector.
///
/// The rotary phases are unwrapped before theta and phi are formed, so both
/// come out continuous. The (theta, phi) -> (theta + pi, phi + pi) ambiguity is
/// fixed once at the first sample, which is placed on theta in (-pi/2, pi/2]
/// and phi in (-pi, pi].
inline EllipseDecomposition ellipse_extract(const AnalyticSignal3& xp, const ExtractOptions& opt = {}) {
  const std::size_t n = xp.size();
  EllipseDecomposition out;
  out.normals = normal_vector(xp, opt.eps_lin);

  EllipseSeries& s = out.states;
  s.dt = xp.dt;
  for (auto* v : {&s.a, &s.b, &s.kappa, &s.lambda, &s.theta, &s.phi, &s.alpha, &s.beta,
                  &s.theta_unwrapped, &s.phi_unwrapped, &s.alpha_unwrapped})
    v->resize(n);
  s.flags.assign(n, 0);
  out.planar.x_tilde.resize(n);
  out.planar.z_tilde.resize(n);

  std::vector<double> phase_plus(n), phase_minus(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  for (std::size_t i = 0; i < n; ++i) {
    const CVec3& x = xp.samples[i];
    const double power = norm2(x);
    const double mag = out.normals.mag[i];
    s.kappa[i] = std::sqrt(power / 2.0);
    s.lambda[i] =
        power > 0.0 ? std::sqrt(std::clamp(1.0 - 4.0 * mag * mag / (power * power), 0.0, 1.0)) : 0.0;
    s.a[i] = s.kappa[i] * std::sqrt(1.0 + s.lambda[i]);
    s.b[i] = s.kappa[i] * std::sqrt(1.0 - s.lambda[i]);

    const Vec3& nh = out.normals.n_hat[i];
    s.beta[i] = std::atan2(std::hypot(nh[0], nh[1]), nh[2]);
    // + 0.0 turns -0.0 into +0.0 so that a vertical normal gives alpha = 0
    s.alpha[i] = std::atan2(nh[0] + 0.0, -nh[1] + 0.0);

    // columns one and two of J3(alpha) J1(beta) span the ellipse plane
    const double ca = std::cos(s.alpha[i]), sa = std::sin(s.alpha[i]);
    const double cb = std::cos(s.beta[i]), sb = std::sin(s.beta[i]);
    const Vec3 e1{ca, sa, 0.0};
    const Vec3 e2{-sa * cb, ca * cb, sb};
    const CVec2 xt{rdot(e1, x), rdot(e2, x)};
    const cplx i1(0.0, 1.0);
    const CVec2 zt{inv_sqrt2 * (xt[0] + i1 * xt[1]), inv_sqrt2 * (xt[0] - i1 * xt[1])};
    out.planar.x_tilde[i] = xt;
    out.planar.z_tilde[i] = zt;
    phase_plus[i] = std::arg(zt[0]);
    phase_minus[i] = std::arg(zt[1]);

    if (out.normals.degenerate[i]) s.flags[i] |= flag::degenerate;
    if (!(power > 0.0)) s.flags[i] |= flag::low_power;
    if (s.lambda[i] < opt.eps_indeterminate) s.flags[i] |= flag::indeterminate;
  }

  if (n == 0) return out;

  auto plus = unwrap(phase_plus);
  auto minus = unwrap(phase_minus);

  // branch selection at the first sample
  const double theta0 = 0.5 * (plus[0] - minus[0]);
  double minus_shift = 0.0;
  if (theta0 > kPi / 2.0)
    minus_shift = 2.0 * kPi;  // theta - pi, phi + pi
  else if (theta0 <= -kPi / 2.0)
    minus_shift = -2.0 * kPi;  // theta + pi, phi - pi
  const double phi0 = 0.5 * (plus[0] + minus[0] + minus_shift);
  double common_shift = 0.0;
  if (phi0 > kPi)
    common_shift = -2.0 * kPi;
  else if (phi0 <= -kPi)
    common_shift = 2.0 * kPi;

  for (std::size_t i = 0; i < n; ++i) {
    const double p = plus[i] + common_shift;
    const double m = minus[i] + minus_shift + common_shift;
    s.theta_unwrapped[i] = 0.5 * (p - m);
    s.phi_unwrapped[i] = 0.5 * (p + m);
    s.theta[i] = principal_angle(s.theta_unwrapped[i]);
    s.phi[i] = principal_angle(s.phi_unwrapped[i]);
  }
  s.alpha_unwrapped = unwrap(s.alpha);
  return out;
}

/// Rates of change of the six ellipse parameters by finite differences of the
/// unwrapped tracks (fourth-order interior, one-sided at the ends).
inline EllipseRates ellipse_rates(const EllipseSeries& s, double dt) {
  EllipseRates r;
  const std::size_t n = s.size();
  const auto dkappa = central_difference4(s.kappa, dt);
  r.dkappa_rel.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    r.dkappa_rel[i] = s.kappa[i] > 0.0 ? dkappa[i] / s.kappa[i] : 0.0;
  r.dlambda = central_difference4(s.lambda, dt);
  r.omega_phi = central_difference4(s.phi_unwrapped, dt);
  r.omega_theta = central_difference4(s.theta_unwrapped, dt);
  r.omega_alpha = central_difference4(s.alpha_unwrapped, dt);
  r.omega_beta = central_difference4(s.beta, dt);
  r.flags = s.flags;
  return r;
}

inline EllipseRates ellipse_rates(const EllipseSeries& s) { return ellipse_rates(s, s.dt); }

}  // namespace trivar
