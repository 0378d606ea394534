#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "trivar/fft.hpp"
#include "trivar/moments.hpp"
#include "trivar/types.hpp"

namespace trivar {

struct TaperSet {
  std::vector<std::vector<double>> tapers;  // K tapers of length N, unit norm
  double time_bandwidth = 0.0;
  std::vector<double> concentrations;

  std::size_t count() const { return tapers.size(); }
  std::size_t length() const { return tapers.empty() ? 0 : tapers.front().size(); }
};

namespace detail {

/// Symmetric tridiagonal matrix: diag[0..n), off[i] couples i-1 and i (off[0] unused).
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }

  /// Number of eigenvalues strictly below x (Sturm sequence count).
  std::size_t count_below(double x) const {
    std::size_t count = 0;
    double q = diag[0] - x;
    const double tiny = std::numeric_limits<double>::min();
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < size(); ++i) {
      if (q == 0.0) q = tiny;
      q = diag[i] - x - off[i] * off[i] / q;
      if (q < 0.0) ++count;
    }
    return count;
  }

  /// Solves (T - shift I) y = rhs with partial pivoting.
  std::vector<double> solve_shifted(double shift, std::vector<double> rhs) const {
    const std::size_t n = size();
    std::vector<double> dl(n, 0.0), d(n), du(n, 0.0), du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) du[i] = dl[i] = off[i + 1];
    const double tiny = std::numeric_limits<double>::epsilon() *
                        std::max(1.0, std::abs(d[0]) + std::abs(du[0]));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double f = dl[i] / d[i];
        d[i + 1] -= f * du[i];
        rhs[i + 1] -= f * rhs[i];
        dl[i] = 0.0;
      } else {
        const double f = d[i] / dl[i];
        d[i] = dl[i];
        const double tmp = d[i + 1];
        d[i + 1] = du[i] - f * tmp;
        du[i] = tmp;
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -f * du2[i];
        }
        std::swap(rhs[i], rhs[i + 1]);
        rhs[i + 1] -= f * rhs[i];
      }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    rhs[n - 1] /= d[n - 1];
    if (n > 1) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;)
      rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
    return rhs;
  }
};

/// The j-th smallest eigenvalue, by bisection on the Sturm count.
inline double tridiagonal_eigenvalue(const Tridiagonal& t, std::size_t j) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = (i > 0 ? std::abs(t.off[i]) : 0.0) + (i + 1 < t.size() ? std::abs(t.off[i + 1]) : 0.0);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (t.count_below(mid) > j)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

inline void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (double& x : v) x /= s;
}

/// Autocorrelation r_j = sum_n h_n h_{n+j}, j = 0..N-1.
inline std::vector<double> autocorrelation(const std::vector<double>& h) {
  const std::size_t n = h.size();
  std::vector<cplx> buf(2 * n, cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) buf[i] = h[i];
  dft_inplace(buf);
  for (auto& v : buf) v = std::norm(v);
  buf = idft(std::move(buf));
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = buf[j].real();
  return r;
}

}  // namespace detail

/// Fraction of a unit-norm sequence's energy inside |f| < w cycles per sample.
inline double band_concentration(const std::vector<double>& h, double w) {
  const auto r = detail::autocorrelation(h);
  double c = 2.0 * w * r[0];
  for (std::size_t j = 1; j < r.size(); ++j) {
    const double jj = static_cast<double>(j);
    c += 2.0 * r[j] * std::sin(2.0 * kPi * w * jj) / (kPi * jj);
  }
  return c;
}

/// The first K discrete prolate spheroidal sequences of length N and
/// half-bandwidth W = P/N, from the commuting tridiagonal matrix. Each taper
/// has unit norm and a positive first nonzero element.
inline TaperSet slepian_tapers(std::size_t n, double p, std::size_t k) {
  if (n < 64) throw InputError("taper length must be at least 64, got " + std::to_string(n));
  if (!(p > 0.0)) throw InputError("time-bandwidth product must be positive");
  if (k == 0) throw InputError("need at least one taper");
  if (static_cast<double>(k) > 2.0 * p - 1.0)
    throw InputError("number of tapers " + std::to_string(k) + " exceeds 2P-1 = " +
                     std::to_string(2.0 * p - 1.0));
  const double w = p / static_cast<double>(n);
  const double nn = static_cast<double>(n);

  detail::Tridiagonal t;
  t.diag.resize(n);
  t.off.assign(n, 0.0);
  const double c = std::cos(2.0 * kPi * w);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = (nn - 1.0 - 2.0 * static_cast<double>(i)) / 2.0;
    t.diag[i] = h * h * c;
    if (i > 0) t.off[i] = static_cast<double>(i) * (nn - static_cast<double>(i)) / 2.0;
  }

  TaperSet out;
  out.time_bandwidth = p;
  for (std::size_t order = 0; order < k; ++order) {
    const double ev = detail::tridiagonal_eigenvalue(t, n - 1 - order);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = 1.0 + 0.1 * std::sin(0.7 * static_cast<double>(i) + static_cast<double>(order));
    for (int iter = 0; iter < 4; ++iter) {
      v = t.solve_shifted(ev, std::move(v));
      for (const auto& prev : out.tapers) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += prev[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * prev[i];
      }
      detail::normalize(v);
    }
    const auto first = std::find_if(v.begin(), v.end(), [](double x) { return std::abs(x) > 1e-12; });
    if (first != v.end() && *first < 0.0)
      for (double& x : v) x = -x;
    out.concentrations.push_back(band_concentration(v, w));
    out.tapers.push_back(std::move(v));
  }
  return out;
}

/// Multitaper estimate of the joint one-sided spectrum of a real
/// three-component record: eigenspectra averaged over tapers, summed over
/// components, normalized to unit integral.
inline JointSpectrum multitaper_joint_spectrum(const RealSignal3& x, const TaperSet& tapers,
                                               std::size_t pad_factor = 8) {
  const std::size_t n = x.size();
  if (tapers.count() == 0) throw InputError("empty taper set");
  if (tapers.length() != n)
    throw InputError("taper length " + std::to_string(tapers.length()) +
                     " does not match signal length " + std::to_string(n));
  if (pad_factor == 0) throw InputError("pad factor must be positive");
  const std::size_t m = n * pad_factor;
  const std::size_t half = m / 2;
  const double dt = x.dt();

  std::vector<double> raw(half + 1, 0.0);
  std::vector<cplx> buf(m);
  for (const auto& h : tapers.tapers) {
    for (int c = 0; c < 3; ++c) {
      std::fill(buf.begin(), buf.end(), cplx(0.0));
      for (std::size_t i = 0; i < n; ++i) buf[i] = h[i] * x[i][c];
      detail::dft_inplace(buf);
      for (std::size_t k = 0; k <= half; ++k) raw[k] += std::norm(buf[k]);
    }
  }
  const double scale = dt / static_cast<double>(tapers.count());
  for (std::size_t k = 0; k <= half; ++k) {
    const bool edge = (k == 0) || (m % 2 == 0 && k == half);
    raw[k] *= scale * (edge ? 1.0 : 2.0);
  }

  return detail::normalized_spectrum(std::move(raw), 2.0 * kPi / (static_cast<double>(m) * dt));
}

}  // namespace trivar
