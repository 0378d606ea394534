#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include "trivar/types.hpp"

namespace trivar::detail {

// FFTW planning is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Unnormalized in-place DFT. Forward uses exp(-i 2 pi k n / N).
inline void dft_inplace(std::vector<cplx>& data, bool inverse = false) {
  if (data.empty()) return;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr,
                            inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

inline std::vector<cplx> dft(std::vector<cplx> x) {
  dft_inplace(x, false);
  return x;
}

/// Inverse DFT including the 1/N factor.
inline std::vector<cplx> idft(std::vector<cplx> spectrum) {
  dft_inplace(spectrum, true);
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  for (auto& v : spectrum) v *= scale;
  return spectrum;
}

/// Signed angular frequency (radians per sample) of DFT bin k of an n-point
/// transform. The Nyquist bin of an even-length transform counts as positive.
inline double bin_frequency(std::size_t k, std::size_t n) {
  const double kk = (k <= n / 2) ? static_cast<double>(k)
                                 : static_cast<double>(k) - static_cast<double>(n);
  return 2.0 * kPi * kk / static_cast<double>(n);
}

inline std::vector<cplx> component(const AnalyticSignal3& x, int c) {
  std::vector<cplx> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x.samples[i][c];
  return out;
}

/// Applies a per-bin multiplier to each component in the frequency domain.
template <typename Multiplier>
AnalyticSignal3 apply_frequency_multiplier(const AnalyticSignal3& x, Multiplier&& m) {
  const std::size_t n = x.size();
  AnalyticSignal3 out{std::vector<CVec3>(n), x.dt};
  for (int c = 0; c < 3; ++c) {
    auto buf = dft(component(x, c));
    for (std::size_t k = 0; k < n; ++k) buf[k] *= m(k, n);
    buf = idft(std::move(buf));
    for (std::size_t i = 0; i < n; ++i) out.samples[i][c] = buf[i];
  }
  return out;
}

}  // namespace trivar::detail
