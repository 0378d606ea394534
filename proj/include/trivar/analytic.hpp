#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "trivar/fft.hpp"
#include "trivar/types.hpp"

namespace trivar {

namespace detail {

/// Weights of the discrete analytic operator: 1 at DC and Nyquist, 2 on
/// positive-frequency bins, 0 on negative-frequency bins. Keeps Re{x+} = x.
inline double analytic_weight(std::size_t k, std::size_t n) {
  if (k == 0) return 1.0;
  if (n % 2 == 0 && k == n / 2) return 1.0;
  return (k < (n + 1) / 2) ? 2.0 : 0.0;
}

}  // namespace detail

/// Analytic signal vector x+ = x + i H{x}, built in the frequency domain by
/// one-sided doubling of each component's DFT.
inline AnalyticSignal3 analytic_transform(const RealSignal3& x) {
  const std::size_t n = x.size();
  AnalyticSignal3 out{std::vector<CVec3>(n), x.dt()};
  std::vector<cplx> buf(n);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = x[i][c];
    detail::dft_inplace(buf);
    for (std::size_t k = 0; k < n; ++k) buf[k] *= detail::analytic_weight(k, n);
    buf = detail::idft(std::move(buf));
    for (std::size_t i = 0; i < n; ++i) out.samples[i][c] = buf[i];
  }
  return out;
}

/// Frequency-domain Hilbert transform: multiplier -i on positive bins
/// (Nyquist included), +i on negative bins, 0 at DC.
inline AnalyticSignal3 hilbert(const AnalyticSignal3& x) {
  return detail::apply_frequency_multiplier(x, [](std::size_t k, std::size_t n) -> cplx {
    if (k == 0) return 0.0;
    return (k <= n / 2) ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
  });
}

/// max |H{x+} + i x+| / max |x+| over samples and components. Zero for an
/// all-zero signal. Small values certify the series is analytic.
inline double hilbert_check(const AnalyticSignal3& xp) {
  if (xp.size() == 0) return 0.0;
  const AnalyticSignal3 h = hilbert(xp);
  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < xp.size(); ++i)
    for (int c = 0; c < 3; ++c) {
      peak = std::max(peak, std::abs(xp.samples[i][c]));
      worst = std::max(worst, std::abs(h.samples[i][c] + cplx(0.0, 1.0) * xp.samples[i][c]));
    }
  return peak > 0.0 ? worst / peak : 0.0;
}

/// Fourth-order central differences in the interior; second-order one-sided
/// stencils on the two outermost samples at each end.
template <typename T>
std::vector<T> central_difference4(std::span<const T> f, double dt) {
  const std::size_t n = f.size();
  if (n < 5) throw InputError("central_difference4 needs at least 5 samples");
  std::vector<T> d(n);
  const double c4 = 1.0 / (12.0 * dt);
  const double c2 = 1.0 / (2.0 * dt);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c4;
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * c2;
  d[1] = (-3.0 * f[1] + 4.0 * f[2] - f[3]) * c2;
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * c2;
  d[n - 2] = (3.0 * f[n - 2] - 4.0 * f[n - 3] + f[n - 4]) * c2;
  return d;
}

inline std::vector<double> central_difference4(const std::vector<double>& f, double dt) {
  return central_difference4(std::span<const double>(f), dt);
}

/// Time derivative of an analytic signal, in signal units per unit time.
///
/// `spectral` multiplies the DFT by i*omega and therefore assumes a periodic
/// record; it is only accurate for signals that taper to zero at both ends.
inline std::vector<CVec3> differentiate(const AnalyticSignal3& xp,
                                        DerivativeScheme scheme = DerivativeScheme::central4) {
  const std::size_t n = xp.size();
  std::vector<CVec3> out(n);
  if (scheme == DerivativeScheme::spectral) {
    const double dt = xp.dt;
    const auto d = detail::apply_frequency_multiplier(xp, [dt](std::size_t k, std::size_t len) {
      return cplx(0.0, detail::bin_frequency(k, len) / dt);
    });
    return d.samples;
  }
  std::vector<cplx> col(n);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < n; ++i) col[i] = xp.samples[i][c];
    const auto d = central_difference4(std::span<const cplx>(col), xp.dt);
    for (std::size_t i = 0; i < n; ++i) out[i][c] = d[i];
  }
  return out;
}

}  // namespace trivar
