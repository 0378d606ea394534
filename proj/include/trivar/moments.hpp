#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "trivar/analytic.hpp"
#include "trivar/ellipse.hpp"
#include "trivar/fft.hpp"
#include "trivar/types.hpp"

namespace trivar {

struct GlobalMoments {
  double energy = 0.0;          // integral of ||x+||^2 dt
  double mean_freq = 0.0;       // radians per unit time
  double second_central = 0.0;  // radians^2 per unit time^2
};

/// Joint instantaneous moments. omega, sigma2 and upsilon2 are in radians
/// (squared) per unit time.
struct MomentsSeries {
  std::vector<double> omega;
  std::vector<double> sigma2;
  std::vector<double> upsilon2;      // ||x+' - i omega x+||^2 / ||x+||^2
  std::vector<double> upsilon2_alt;  // ||x+'||^2 / ||x+||^2 - omega^2
  std::vector<double> power;
  Flags flags;
  double mean_freq = 0.0;  // the global mean frequency used in sigma2

  std::size_t size() const { return omega.size(); }
};

struct BandwidthForms {
  std::vector<double> deviation;   // ||x+' - i omega x+||^2 / ||x+||^2, never negative
  std::vector<double> difference;  // ||x+'||^2 / ||x+||^2 - omega^2
};

namespace detail {

inline void require_energy(const AnalyticSignal3& xp) {
  for (const auto& s : xp.samples)
    if (norm2(s) > 0.0) return;
  throw NumericalError("signal has zero energy");
}

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

/// Trapezoid weights for n equally spaced points.
inline std::vector<double> trapezoid_weights(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n > 0) {
    w.front() = 0.5;
    w.back() = 0.5;
  }
  return w;
}

}  // namespace detail

inline std::vector<double> joint_instantaneous_frequency(const AnalyticSignal3& xp,
                                                         std::span<const CVec3> deriv) {
  detail::require_energy(xp);
  std::vector<double> omega(xp.size());
  for (std::size_t i = 0; i < xp.size(); ++i) {
    const double p = norm2(xp.samples[i]);
    omega[i] = p > 0.0 ? hdot(xp.samples[i], deriv[i]).imag() / p : detail::nan();
  }
  return omega;
}

inline std::vector<double> joint_instantaneous_frequency(
    const AnalyticSignal3& xp, DerivativeScheme scheme = DerivativeScheme::central4) {
  detail::require_energy(xp);
  return joint_instantaneous_frequency(xp, differentiate(xp, scheme));
}

inline std::vector<double> joint_second_central(const AnalyticSignal3& xp,
                                                std::span<const CVec3> deriv, double mean_freq) {
  detail::require_energy(xp);
  std::vector<double> sigma2(xp.size());
  const cplx shift(0.0, mean_freq);
  for (std::size_t i = 0; i < xp.size(); ++i) {
    const CVec3& x = xp.samples[i];
    const double p = norm2(x);
    const CVec3 dev{deriv[i][0] - shift * x[0], deriv[i][1] - shift * x[1],
                    deriv[i][2] - shift * x[2]};
    sigma2[i] = p > 0.0 ? norm2(dev) / p : detail::nan();
  }
  return sigma2;
}

inline std::vector<double> joint_second_central(
    const AnalyticSignal3& xp, double mean_freq,
    DerivativeScheme scheme = DerivativeScheme::central4) {
  detail::require_energy(xp);
  return joint_second_central(xp, differentiate(xp, scheme), mean_freq);
}

inline BandwidthForms joint_bandwidth_sq(const AnalyticSignal3& xp, std::span<const CVec3> deriv) {
  const auto omega = joint_instantaneous_frequency(xp, deriv);
  BandwidthForms out{std::vector<double>(xp.size()), std::vector<double>(xp.size())};
  for (std::size_t i = 0; i < xp.size(); ++i) {
    const CVec3& x = xp.samples[i];
    const double p = norm2(x);
    if (!(p > 0.0)) {
      out.deviation[i] = out.difference[i] = detail::nan();
      continue;
    }
    const cplx shift(0.0, omega[i]);
    const CVec3 dev{deriv[i][0] - shift * x[0], deriv[i][1] - shift * x[1],
                    deriv[i][2] - shift * x[2]};
    out.deviation[i] = norm2(dev) / p;
    out.difference[i] = norm2(deriv[i]) / p - omega[i] * omega[i];
  }
  return out;
}

inline BandwidthForms joint_bandwidth_sq(const AnalyticSignal3& xp,
                                         DerivativeScheme scheme = DerivativeScheme::central4) {
  detail::require_energy(xp);
  return joint_bandwidth_sq(xp, differentiate(xp, scheme));
}

/// One-sided spectrum on a uniform grid 0 .. pi/dt.
struct JointSpectrum {
  std::vector<double> freqs;   // radians per unit time
  std::vector<double> values;  // normalized: trapezoid integral of values / (2 pi) is 1
  GlobalMoments moments;
};

/// Trapezoid integral of values / (2 pi) over freqs; 1 for a normalized spectrum.
inline double spectrum_integral(const JointSpectrum& s) {
  if (s.freqs.size() < 2) return 0.0;
  const double dw = s.freqs[1] - s.freqs[0];
  const auto w = detail::trapezoid_weights(s.freqs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) acc += w[k] * s.values[k];
  return acc * dw / (2.0 * kPi);
}

namespace detail {

/// Normalizes a raw one-sided spectrum (values already in energy per unit
/// angular frequency times 2 pi) and fills in its moments.
inline JointSpectrum normalized_spectrum(std::vector<double> raw, double dw) {
  const auto w = trapezoid_weights(raw.size());
  double integral = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) integral += w[k] * raw[k];
  integral *= dw / (2.0 * kPi);
  if (!(integral > 0.0)) throw NumericalError("spectrum has zero energy on positive frequencies");

  JointSpectrum s;
  s.freqs.resize(raw.size());
  s.values.resize(raw.size());
  double first = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    s.freqs[k] = dw * static_cast<double>(k);
    s.values[k] = raw[k] / integral;
    first += w[k] * s.freqs[k] * s.values[k];
  }
  s.moments.mean_freq = first * dw / (2.0 * kPi);
  double second = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double d = s.freqs[k] - s.moments.mean_freq;
    second += w[k] * d * d * s.values[k];
  }
  s.moments.second_central = second * dw / (2.0 * kPi);
  s.moments.energy = integral;
  return s;
}

}  // namespace detail

/// Spectrum of x+ from its DFT, zero-padded to pad_factor * N points, kept
/// on [0, pi/dt] and normalized to unit trapezoid integral.
inline JointSpectrum analytic_spectrum(const AnalyticSignal3& xp, std::size_t pad_factor = 16) {
  detail::require_energy(xp);
  if (pad_factor == 0) throw InputError("pad factor must be positive");
  const std::size_t n = xp.size();
  const std::size_t m = n * pad_factor;
  const double dt = xp.dt;
  const std::size_t half = m / 2;

  std::vector<double> raw(half + 1, 0.0);
  std::vector<cplx> buf(m);
  for (int c = 0; c < 3; ++c) {
    std::fill(buf.begin(), buf.end(), cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) buf[i] = xp.samples[i][c];
    detail::dft_inplace(buf);
    for (std::size_t k = 0; k <= half; ++k) raw[k] += std::norm(buf[k] * dt);
  }
  return detail::normalized_spectrum(std::move(raw), 2.0 * kPi / (static_cast<double>(m) * dt));
}

/// Global energy, mean frequency and second central moment from the
/// analytic spectrum (trapezoid quadrature over positive frequencies).
inline GlobalMoments global_moments_spectral(const AnalyticSignal3& xp, std::size_t pad_factor = 16) {
  return analytic_spectrum(xp, pad_factor).moments;
}

/// All pointwise moments. sigma2 uses `mean_freq` when given, otherwise the
/// spectral global mean frequency.
inline MomentsSeries joint_moments(const AnalyticSignal3& xp, std::span<const CVec3> deriv,
                                   std::optional<double> mean_freq = std::nullopt,
                                   double eps_pow = 1e-8, double edge_fraction = 0.05) {
  detail::require_energy(xp);
  MomentsSeries m;
  m.mean_freq = mean_freq ? *mean_freq : global_moments_spectral(xp).mean_freq;
  m.power = xp.power();
  m.omega = joint_instantaneous_frequency(xp, deriv);
  m.sigma2 = joint_second_central(xp, deriv, m.mean_freq);
  auto forms = joint_bandwidth_sq(xp, deriv);
  m.upsilon2 = std::move(forms.deviation);
  m.upsilon2_alt = std::move(forms.difference);

  m.flags = edge_flags(xp.size(), edge_fraction);
  const double pmax = *std::max_element(m.power.begin(), m.power.end());
  for (std::size_t i = 0; i < xp.size(); ++i)
    if (!(m.power[i] >= eps_pow * pmax) || m.power[i] == 0.0) m.flags[i] |= flag::low_power;
  return m;
}

inline MomentsSeries joint_moments(const AnalyticSignal3& xp,
                                   DerivativeScheme scheme = DerivativeScheme::central4,
                                   std::optional<double> mean_freq = std::nullopt) {
  detail::require_energy(xp);
  return joint_moments(xp, differentiate(xp, scheme), mean_freq);
}

/// Power-weighted trapezoid averages of omega and sigma2 over time. Samples
/// whose flags intersect `exclude` get zero weight.
inline GlobalMoments global_moments_time(const MomentsSeries& m, double dt,
                                         std::uint8_t exclude = 0) {
  const auto w = detail::trapezoid_weights(m.size());
  double e = 0.0, first = 0.0, second = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.flags[i] & exclude) continue;
    if (!(m.power[i] > 0.0)) continue;
    const double wp = w[i] * m.power[i];
    e += wp;
    first += wp * m.omega[i];
    second += wp * m.sigma2[i];
  }
  if (!(e > 0.0)) throw NumericalError("zero energy over the included samples");
  return GlobalMoments{e * dt, first / e, second / e};
}

inline GlobalMoments global_moments_time(const AnalyticSignal3& xp, const MomentsSeries& m,
                                         std::uint8_t exclude = 0) {
  return global_moments_time(m, xp.dt, exclude);
}

// ---------------------------------------------------------------------------
// geometric decomposition of the bandwidth

struct BandwidthDecomposition {
  std::vector<double> term_amplitude;    // (kappa'/kappa)^2
  std::vector<double> term_deformation;  // lambda'^2 / (4 (1 - lambda^2))
  std::vector<double> term_precession;   // lambda^2 (omega_theta + omega_alpha cos beta)^2
  std::vector<double> term_normal;       // |n_hat^T x+'|^2 / ||x+||^2
  std::vector<double> term_normal_planar;  // same term from omega_alpha, omega_beta and x~
  std::vector<double> normal_bound;        // omega_alpha^2 sin^2 beta + omega_beta^2
  std::vector<double> sum;
  std::vector<double> bound;
  Flags flags;

  std::size_t size() const { return sum.size(); }
};

struct EffectivePrecession {
  std::vector<double> from_rates;      // omega_theta + omega_alpha cos beta
  std::vector<double> from_frequency;  // (omega_x - omega_phi) / sqrt(1 - lambda^2)
  std::vector<double> residual;
  Flags flags;
};

/// Effective precession rate computed two ways. Samples where
/// sqrt(1 - lambda^2) < near_linear are flagged degenerate.
inline EffectivePrecession effective_precession(const EllipseSeries& s, const EllipseRates& r,
                                                std::span<const double> omega,
                                                double near_linear = 1e-6) {
  const std::size_t n = s.size();
  EffectivePrecession e{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                        r.flags};
  for (std::size_t i = 0; i < n; ++i) {
    const double circ = std::sqrt(std::max(0.0, 1.0 - s.lambda[i] * s.lambda[i]));
    e.from_rates[i] = r.omega_theta[i] + r.omega_alpha[i] * std::cos(s.beta[i]);
    if (circ < near_linear) {
      e.flags[i] |= flag::degenerate;
      e.from_frequency[i] = detail::nan();
      e.residual[i] = detail::nan();
      continue;
    }
    e.from_frequency[i] = (omega[i] - r.omega_phi[i]) / circ;
    e.residual[i] = e.from_frequency[i] - e.from_rates[i];
  }
  return e;
}

/// omega_phi + sqrt(1 - lambda^2)(omega_theta + omega_alpha cos beta): the
/// instantaneous frequency rebuilt from the ellipse rates.
inline std::vector<double> frequency_from_rates(const EllipseSeries& s, const EllipseRates& r) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double circ = std::sqrt(std::max(0.0, 1.0 - s.lambda[i] * s.lambda[i]));
    out[i] = r.omega_phi[i] + circ * (r.omega_theta[i] + r.omega_alpha[i] * std::cos(s.beta[i]));
  }
  return out;
}

/// Splits the squared bandwidth into amplitude, deformation, precession and
/// out-of-plane terms.
///
/// The out-of-plane term is the projection of x+' on the unit normal; the
/// planar form built from omega_alpha and omega_beta is returned alongside as
/// a cross-check. The precession term uses lambda^2 (omega - omega_phi)^2 /
/// (1 - lambda^2), which depends only on frame-invariant quantities.
inline BandwidthDecomposition bandwidth_decompose(const AnalyticSignal3& xp,
                                                  std::span<const CVec3> deriv,
                                                  const EllipseDecomposition& ell,
                                                  const EllipseRates& r,
                                                  std::span<const double> omega) {
  const std::size_t n = xp.size();
  const EllipseSeries& s = ell.states;
  BandwidthDecomposition d;
  for (auto* v : {&d.term_amplitude, &d.term_deformation, &d.term_precession, &d.term_normal,
                  &d.term_normal_planar, &d.normal_bound, &d.sum, &d.bound})
    v->resize(n);
  d.flags = r.flags;

  for (std::size_t i = 0; i < n; ++i) {
    const double p = norm2(xp.samples[i]);
    const double lam = s.lambda[i];
    const double one_minus = std::max(0.0, 1.0 - lam * lam);
    if (!(p > 0.0)) {
      d.flags[i] |= flag::low_power;
      d.term_amplitude[i] = d.term_deformation[i] = d.term_precession[i] = d.term_normal[i] =
          d.term_normal_planar[i] = d.normal_bound[i] = d.sum[i] = d.bound[i] = detail::nan();
      continue;
    }
    if (one_minus <= 0.0) d.flags[i] |= flag::degenerate;

    d.term_amplitude[i] = r.dkappa_rel[i] * r.dkappa_rel[i];
    d.term_deformation[i] =
        one_minus > 0.0 ? 0.25 * r.dlambda[i] * r.dlambda[i] / one_minus
                        : (r.dlambda[i] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    const double excess = omega[i] - r.omega_phi[i];
    d.term_precession[i] = one_minus > 0.0 ? lam * lam * excess * excess / one_minus : 0.0;

    const cplx along = rdot(ell.normals.n_hat[i], deriv[i]);
    d.term_normal[i] = std::norm(along) / p;

    const CVec2& xt = ell.planar.x_tilde[i];
    const double sb = std::sin(s.beta[i]);
    const cplx proj = -r.omega_alpha[i] * sb * xt[0] + r.omega_beta[i] * xt[1];
    const double xt2 = std::norm(xt[0]) + std::norm(xt[1]);
    d.term_normal_planar[i] = xt2 > 0.0 ? std::norm(proj) / xt2 : detail::nan();
    d.normal_bound[i] = r.omega_alpha[i] * r.omega_alpha[i] * sb * sb + r.omega_beta[i] * r.omega_beta[i];

    d.sum[i] = d.term_amplitude[i] + d.term_deformation[i] + d.term_precession[i] + d.term_normal[i];
    const double prec = std::abs(r.omega_theta[i]) + std::abs(r.omega_alpha[i]);
    d.bound[i] = d.term_amplitude[i] + d.term_deformation[i] + r.omega_beta[i] * r.omega_beta[i] +
                 prec * prec;
  }
  return d;
}

}  // namespace trivar
