#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trivar/analytic.hpp"
#include "trivar/ellipse.hpp"
#include "trivar/moments.hpp"
#include "trivar/types.hpp"

namespace trivar {

struct RunConfig {
  DerivativeScheme scheme = DerivativeScheme::central4;
  double edge_fraction = 0.05;
  double eps_lin = 1e-6;
  double eps_pow = 1e-8;
  double eps_indeterminate = 1e-6;
  double taper_p = 2.0;
  std::size_t tapers = 3;
  std::size_t pad_factor = 8;            // multitaper spectrum
  std::size_t moment_pad_factor = 16;    // spectral global moments
  double bearing_deg = 0.0;

  void validate() const;
};

inline void RunConfig::validate() const {
  if (!(edge_fraction >= 0.0 && edge_fraction < 0.5)) throw InputError("trim fraction must be in [0, 0.5)");
  if (!(eps_lin > 0.0) || !(eps_pow > 0.0) || !(eps_indeterminate > 0.0))
    throw InputError("thresholds must be positive");
  if (!(taper_p > 0.0)) throw InputError("taper time-bandwidth must be positive");
  if (tapers == 0 || static_cast<double>(tapers) > 2.0 * taper_p - 1.0)
    throw InputError("number of tapers must be between 1 and 2P-1");
  if (pad_factor == 0 || moment_pad_factor == 0) throw InputError("pad factor must be positive");
}

/// Samples with these flags carry no weight in the summary statistics.
inline constexpr std::uint8_t kSummaryExclude = flag::edge | flag::low_power;

struct Analysis {
  AnalyticSignal3 xp;
  std::vector<CVec3> deriv;
  EllipseDecomposition ellipse;
  EllipseRates rates;
  MomentsSeries moments;
  BandwidthDecomposition terms;
  Flags flags;  // union of every stage's flags
  GlobalMoments time_moments;
  GlobalMoments spectral_moments;
  std::size_t flags_excluded = 0;
};

/// analytic signal -> ellipse parameters and rates -> moments -> bandwidth terms.
inline Analysis analyze(const AnalyticSignal3& xp, const RunConfig& cfg = {}) {
  cfg.validate();
  Analysis a;
  a.xp = xp;
  a.deriv = differentiate(a.xp, cfg.scheme);
  a.spectral_moments = global_moments_spectral(a.xp, cfg.moment_pad_factor);
  a.moments = joint_moments(a.xp, a.deriv, a.spectral_moments.mean_freq, cfg.eps_pow, cfg.edge_fraction);
  a.ellipse = ellipse_extract(a.xp, ExtractOptions{cfg.eps_lin, cfg.eps_indeterminate});
  a.rates = ellipse_rates(a.ellipse.states);
  a.terms = bandwidth_decompose(a.xp, a.deriv, a.ellipse, a.rates, a.moments.omega);

  a.flags = a.moments.flags;
  merge_flags(a.flags, a.ellipse.states.flags);
  merge_flags(a.flags, a.terms.flags);
  a.moments.flags = a.flags;
  a.time_moments = global_moments_time(a.moments, a.xp.dt, kSummaryExclude);
  for (auto f : a.flags)
    if (f & kSummaryExclude) ++a.flags_excluded;
  return a;
}

inline Analysis analyze(const RealSignal3& x, const RunConfig& cfg = {}) {
  cfg.validate();
  return analyze(analytic_transform(x), cfg);
}

/// Applies the horizontal rotation rot_z(-bearing), so the first output
/// channel points along the bearing: x' = cos(B) x + sin(B) y.
inline RealSignal3 rotate_to_bearing(const RealSignal3& x, double bearing_deg) {
  if (bearing_deg == 0.0) return x;
  return rotate_frame(x, rot_z(-bearing_deg * kPi / 180.0));
}

}  // namespace trivar
