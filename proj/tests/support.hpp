#pragma once

// Shared fixtures and independent reference computations for the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "trivar/trivar.hpp"

namespace trivar::testing {

/// O(N^2) DFT with exactly reduced twiddle indices; no FFT involved.
inline std::vector<cplx> direct_dft(const std::vector<cplx>& x, bool inverse = false) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = (k * j) % n;
      acc += x[j] * std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(idx) / static_cast<double>(n));
    }
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

/// Analytic signal of one real component through the direct DFT.
inline std::vector<cplx> direct_analytic(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<cplx> buf(x.begin(), x.end());
  auto spec = direct_dft(buf);
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k == n) continue;
    spec[k] *= (2 * k < n) ? 2.0 : 0.0;
  }
  return direct_dft(spec, true);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Smooth random ellipse parameter paths. Frequencies are drawn for unit
/// sample spacing and multiplied by `freq_scale`; time runs as i * dt.
struct RandomPaths {
  double kappa0, kappa_amp, kappa_nu, kappa_ph;
  double lambda_mid, lambda_amp, lambda_nu, lambda_ph;
  double theta0, theta_rate, theta_amp, theta_nu;
  double phi_rate, phi_amp, phi_nu;
  double alpha0, alpha_rate, alpha_amp, alpha_nu;
  double beta_mid, beta_amp, beta_nu, beta_ph;

  static RandomPaths draw(std::uint64_t seed, double freq_scale = 1.0) {
    std::mt19937_64 rng(seed);
    auto u = [&](double lo, double hi) { return uniform(rng, lo, hi); };
    const double s = freq_scale;
    RandomPaths p{};
    p.kappa0 = u(0.5, 2.0);
    p.kappa_amp = u(0.1, 0.4);
    p.kappa_nu = s * u(0.002, 0.008);
    p.kappa_ph = u(0, 2 * kPi);
    p.lambda_mid = u(0.35, 0.55);
    p.lambda_amp = u(0.1, 0.25);
    p.lambda_nu = s * u(0.002, 0.008);
    p.lambda_ph = u(0, 2 * kPi);
    p.theta0 = u(-1.0, 1.0);
    p.theta_rate = s * u(-0.004, 0.004);
    p.theta_amp = u(0.1, 0.4);
    p.theta_nu = s * u(0.002, 0.008);
    p.phi_rate = s * u(0.08, 0.16);
    p.phi_amp = u(0.1, 0.5);
    p.phi_nu = s * u(0.002, 0.008);
    p.alpha0 = u(-kPi, kPi);
    p.alpha_rate = s * u(-0.004, 0.004);
    p.alpha_amp = u(0.1, 0.4);
    p.alpha_nu = s * u(0.002, 0.008);
    p.beta_mid = u(1.2, 1.9);
    p.beta_amp = u(0.2, 0.6);
    p.beta_nu = s * u(0.002, 0.008);
    p.beta_ph = u(0, 2 * kPi);
    return p;
  }

  EllipseState at(double t) const {
    const double kappa = kappa0 * std::exp(kappa_amp * std::sin(kappa_nu * t + kappa_ph));
    const double lambda = lambda_mid + lambda_amp * std::sin(lambda_nu * t + lambda_ph);
    return EllipseState::from_shape(kappa, lambda,
                                    theta0 + theta_rate * t + theta_amp * std::sin(theta_nu * t),
                                    phi_rate * t + phi_amp * std::sin(phi_nu * t),
                                    alpha0 + alpha_rate * t + alpha_amp * std::sin(alpha_nu * t),
                                    beta_mid + beta_amp * std::sin(beta_nu * t + beta_ph));
  }

  std::vector<EllipseState> states(std::size_t n, double dt = 1.0) const {
    std::vector<EllipseState> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = at(static_cast<double>(i) * dt);
    return out;
  }
};

inline AnalyticSignal3 random_modulated_signal(std::uint64_t seed, std::size_t n = 1024,
                                               double dt = 1.0, double freq_scale = 1.0) {
  return ellipse_synthesize(RandomPaths::draw(seed, freq_scale).states(n, dt), dt);
}

/// Real part of a smooth random ellipse under a Gaussian envelope that is
/// negligible at both ends, so the record suits the DFT analytic transform.
inline RealSignal3 random_modulated_packet(std::uint64_t seed, std::size_t n = 1024,
                                           double width_fraction = 0.08) {
  auto states = RandomPaths::draw(seed).states(n);
  const double centre = 0.5 * static_cast<double>(n - 1);
  const double width = width_fraction * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double env = std::exp(-0.5 * std::pow((static_cast<double>(i) - centre) / width, 2));
    states[i].a *= env;
    states[i].b *= env;
    states[i].kappa *= env;
  }
  return RealSignal3(ellipse_synthesize(states).real_trajectory());
}

/// Real three-component record: a few carriers per component under a common
/// Gaussian envelope that is negligible at both ends.
inline RealSignal3 random_real_packet(std::uint64_t seed, std::size_t n = 2048) {
  std::mt19937_64 rng(seed);
  auto u = [&](double lo, double hi) { return uniform(rng, lo, hi); };
  const double centre = 0.5 * static_cast<double>(n) + u(-0.05, 0.05) * static_cast<double>(n);
  const double width = u(0.07, 0.1) * static_cast<double>(n);
  double amp[3][3], freq[3][3], ph[3][3];
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < 3; ++j) {
      amp[c][j] = u(0.2, 1.0);
      freq[c][j] = u(0.05, 0.15);
      ph[c][j] = u(0, 2 * kPi);
    }
  std::vector<Vec3> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    const double env = std::exp(-0.5 * std::pow((t - centre) / width, 2));
    for (int c = 0; c < 3; ++c) {
      double v = 0.0;
      for (int j = 0; j < 3; ++j) v += amp[c][j] * std::cos(freq[c][j] * t + ph[c][j]);
      x[i][c] = env * v;
    }
  }
  return RealSignal3(std::move(x));
}

/// Uniformly distributed proper rotation (unit quaternion).
inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double q[4];
  double s = 0.0;
  for (double& v : q) {
    v = g(rng);
    s += v * v;
  }
  s = std::sqrt(s);
  for (double& v : q) v /= s;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b,
                           std::size_t skip = 0) {
  double m = 0.0;
  for (std::size_t i = skip; i + skip < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace trivar::testing
