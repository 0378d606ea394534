#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace trivar {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;
using CVec2 = std::array<cplx, 2>;
/// Row-major 3x3 matrix.
using Mat3 = std::array<Vec3, 3>;

inline constexpr double kPi = std::numbers::pi;

/// Input that violates a precondition: wrong length, non-finite values,
/// malformed files, improper rotations.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Valid input for which the requested quantity does not exist
/// (zero energy, all-zero signal).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DerivativeScheme { central4, spectral };

/// Per-sample reliability bits. Every per-sample series carries a vector of
/// these; analyses OR them together.
namespace flag {
inline constexpr std::uint8_t edge = 1;           // within the edge band of the record
inline constexpr std::uint8_t degenerate = 2;     // ellipse plane undefined (linear motion)
inline constexpr std::uint8_t low_power = 4;      // power below eps_pow * max power
inline constexpr std::uint8_t indeterminate = 8;  // circular motion: theta and phi not separable
}  // namespace flag

using Flags = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// small fixed-size linear algebra

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& f, const Vec3& g) {
  return {f[1] * g[2] - f[2] * g[1], f[2] * g[0] - f[0] * g[2], f[0] * g[1] - f[1] * g[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 scaled(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

inline Vec3 real_part(const CVec3& z) { return {z[0].real(), z[1].real(), z[2].real()}; }
inline Vec3 imag_part(const CVec3& z) { return {z[0].imag(), z[1].imag(), z[2].imag()}; }

/// Squared Hermitian norm.
inline double norm2(const CVec3& z) { return std::norm(z[0]) + std::norm(z[1]) + std::norm(z[2]); }

/// z^H w
inline cplx hdot(const CVec3& z, const CVec3& w) {
  return std::conj(z[0]) * w[0] + std::conj(z[1]) * w[1] + std::conj(z[2]) * w[2];
}

/// Real vector against complex vector, no conjugation: r^T z.
inline cplx rdot(const Vec3& r, const CVec3& z) { return r[0] * z[0] + r[1] * z[1] + r[2] * z[2]; }

inline Mat3 identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {dot(a[0], v), dot(a[1], v), dot(a[2], v)};
}

inline CVec3 operator*(const Mat3& a, const CVec3& v) {
  return {rdot(a[0], v), rdot(a[1], v), rdot(a[2], v)};
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

inline double det(const Mat3& a) { return dot(a[0], cross(a[1], a[2])); }

// ---------------------------------------------------------------------------
// angles

/// Principal value in (-pi, pi].
inline double principal_angle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

/// Removes 2*pi jumps between consecutive samples.
inline std::vector<double> unwrap(const std::vector<double>& angles) {
  std::vector<double> out(angles.size());
  if (angles.empty()) return out;
  out[0] = angles[0];
  double offset = 0.0;
  for (std::size_t i = 1; i < angles.size(); ++i) {
    const double jump = angles[i] - angles[i - 1];
    offset -= 2.0 * kPi * std::round(jump / (2.0 * kPi));
    out[i] = angles[i] + offset;
  }
  return out;
}

// ---------------------------------------------------------------------------
// edge policy

/// Number of samples at each end of an N-sample record that carry the edge
/// flag: max(8, ceil(fraction * N)), never more than half the record.
inline std::size_t edge_width(std::size_t n, double fraction = 0.05) {
  const auto frac = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  return std::min(std::max<std::size_t>(8, frac), n / 2);
}

inline Flags edge_flags(std::size_t n, double fraction = 0.05) {
  Flags f(n, 0);
  const std::size_t w = edge_width(n, fraction);
  for (std::size_t i = 0; i < w; ++i) {
    f[i] |= flag::edge;
    f[n - 1 - i] |= flag::edge;
  }
  return f;
}

inline void merge_flags(Flags& into, const Flags& from) {
  for (std::size_t i = 0; i < into.size() && i < from.size(); ++i) into[i] |= from[i];
}

// ---------------------------------------------------------------------------
// signals

/// A real three-component record, demeaned on construction.
class RealSignal3 {
 public:
  static constexpr std::size_t kMinSamples = 8;

  explicit RealSignal3(std::vector<Vec3> samples, double dt = 1.0)
      : samples_(std::move(samples)), dt_(dt) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_))
      throw InputError("sample interval must be finite and positive");
    if (samples_.size() < kMinSamples)
      throw InputError("need at least " + std::to_string(kMinSamples) + " samples, got " +
                       std::to_string(samples_.size()));
    for (std::size_t i = 0; i < samples_.size(); ++i)
      for (int c = 0; c < 3; ++c)
        if (!std::isfinite(samples_[i][c]))
          throw InputError("non-finite value at sample " + std::to_string(i) + ", component " +
                           std::to_string(c));
    for (const auto& s : samples_)
      for (int c = 0; c < 3; ++c) mean_[c] += s[c];
    for (double& m : mean_) m /= static_cast<double>(samples_.size());
    for (auto& s : samples_)
      for (int c = 0; c < 3; ++c) s[c] -= mean_[c];
  }

  const std::vector<Vec3>& samples() const { return samples_; }
  const Vec3& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  double dt() const { return dt_; }
  /// Per-component mean removed at construction.
  const Vec3& removed_mean() const { return mean_; }

 private:
  std::vector<Vec3> samples_;
  double dt_;
  Vec3 mean_{};
};

/// Complex three-component series; produced by analytic_transform or by
/// direct synthesis from ellipse parameters.
struct AnalyticSignal3 {
  std::vector<CVec3> samples;
  double dt = 1.0;

  std::size_t size() const { return samples.size(); }
  const CVec3& operator[](std::size_t i) const { return samples[i]; }

  std::vector<Vec3> real_trajectory() const {
    std::vector<Vec3> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = real_part(samples[i]);
    return out;
  }

  std::vector<double> power() const {
    std::vector<double> p(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) p[i] = norm2(samples[i]);
    return p;
  }
};

}  // namespace trivar
