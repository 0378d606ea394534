#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "trivar/ellipse.hpp"
#include "trivar/types.hpp"

namespace trivar {

/// Which single geometric rate is nonzero in a generated signal.
enum class SynthMode { amplitude, internal_precession, deformation, nutation, azimuth, fixed_geometry };

inline std::string_view to_string(SynthMode m) {
  switch (m) {
    case SynthMode::amplitude: return "amplitude";
    case SynthMode::internal_precession: return "internal_precession";
    case SynthMode::deformation: return "deformation";
    case SynthMode::nutation: return "nutation";
    case SynthMode::azimuth: return "azimuth";
    case SynthMode::fixed_geometry: return "fixed_geometry";
  }
  return "?";
}

inline SynthMode parse_synth_mode(std::string_view s) {
  for (auto m : {SynthMode::amplitude, SynthMode::internal_precession, SynthMode::deformation,
                 SynthMode::nutation, SynthMode::azimuth, SynthMode::fixed_geometry})
    if (s == to_string(m)) return m;
  throw InputError("unknown synth mode '" + std::string(s) +
                   "' (expected amplitude, internal_precession, deformation, nutation, azimuth "
                   "or fixed_geometry)");
}

/// a=3, b=2, theta=pi/3, phi=5pi/6, alpha=pi/6, beta=pi/4.
inline EllipseState reference_state() {
  return EllipseState::from_axes(3.0, 2.0, kPi / 3.0, 5.0 * kPi / 6.0, kPi / 6.0, kPi / 4.0);
}

struct SynthSpec {
  std::size_t n_samples = 800;
  SynthMode mode = SynthMode::amplitude;
  double omega_bar = kPi / 100.0;  // target instantaneous frequency, rad/sample
  double upsilon = 2.5e-4 * kPi;   // target instantaneous bandwidth, rad/sample
  EllipseState base_state = reference_state();
  double precession_linearity = 0.6;  // lambda used by internal_precession
};

struct SingleRateSignal {
  AnalyticSignal3 signal;
  std::vector<EllipseState> states;
  EllipseRates rates;
};

/// A signal whose instantaneous frequency is omega_bar and whose bandwidth
/// is upsilon at every sample, with exactly one ellipse rate carrying the
/// bandwidth. Time is the sample index.
///
/// amplitude            kappa grows as exp(upsilon t)
/// internal_precession  lambda fixed, theta turns at upsilon / lambda
/// deformation          lambda = sin(2 upsilon t + c), c centres the path on pi/4
/// nutation             circular, beta grows at sqrt(2) upsilon
/// azimuth              circular, alpha turns at sqrt(2) upsilon / sin(beta)
/// fixed_geometry       only the phase advances
inline SingleRateSignal make_single_rate_signal(const SynthSpec& spec) {
  const std::size_t n = spec.n_samples;
  if (n < 64) throw InputError("need at least 64 samples, got " + std::to_string(n));
  if (!(spec.omega_bar > 0.0) || !std::isfinite(spec.omega_bar))
    throw InputError("omega_bar must be positive");
  if (!(spec.upsilon >= 0.0) || !std::isfinite(spec.upsilon))
    throw InputError("upsilon must be non-negative");

  const EllipseState& b0 = spec.base_state;
  if (!(b0.kappa > 0.0)) throw InputError("base state needs positive amplitude");
  if (!(b0.lambda >= 0.0 && b0.lambda < 1.0)) throw InputError("base state linearity must be in [0,1)");
  const double ups = spec.upsilon;
  const double tmax = static_cast<double>(n - 1);

  double kappa0 = b0.kappa, lambda0 = b0.lambda, beta0 = b0.beta;
  double r_kappa = 0.0, r_theta = 0.0, r_alpha = 0.0, r_beta = 0.0, r_phi = spec.omega_bar;
  double deform_offset = 0.0;

  switch (spec.mode) {
    case SynthMode::amplitude:
      r_kappa = ups;
      break;
    case SynthMode::internal_precession:
      lambda0 = spec.precession_linearity;
      if (!(lambda0 > 0.0 && lambda0 < 1.0))
        throw InputError("internal precession needs linearity in (0,1)");
      r_theta = ups / lambda0;
      r_phi = spec.omega_bar - std::sqrt(1.0 - lambda0 * lambda0) * r_theta;
      break;
    case SynthMode::deformation:
      deform_offset = kPi / 4.0 - ups * tmax;
      if (deform_offset < 0.0 || deform_offset + 2.0 * ups * tmax >= kPi / 2.0)
        throw InputError("deformation path leaves linearity range [0,1): upsilon * (N-1) too large");
      break;
    case SynthMode::nutation:
      lambda0 = 0.0;
      r_beta = std::sqrt(2.0) * ups;
      if (!(beta0 > 0.0) || !(beta0 + r_beta * tmax < kPi))
        throw InputError("nutation path leaves zenith range (0, pi)");
      break;
    case SynthMode::azimuth: {
      lambda0 = 0.0;
      const double sb = std::sin(beta0);
      if (std::abs(sb) < 1e-3 || std::abs(std::cos(beta0)) < 1e-3)
        throw InputError("azimuth mode needs a zenith angle away from 0, pi/2 and pi");
      r_alpha = std::sqrt(2.0) * ups / sb;
      r_phi = spec.omega_bar - r_alpha * std::cos(beta0);
      break;
    }
    case SynthMode::fixed_geometry:
      break;
  }

  SingleRateSignal out;
  out.states.resize(n);
  auto& r = out.rates;
  for (auto* v : {&r.dkappa_rel, &r.dlambda, &r.omega_phi, &r.omega_theta, &r.omega_alpha, &r.omega_beta})
    v->assign(n, 0.0);
  r.flags.assign(n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    double lambda = lambda0;
    if (spec.mode == SynthMode::deformation) {
      const double arg = 2.0 * ups * t + deform_offset;
      lambda = std::sin(arg);
      r.dlambda[i] = 2.0 * ups * std::cos(arg);
    }
    out.states[i] = EllipseState::from_shape(kappa0 * std::exp(r_kappa * t), lambda,
                                             b0.theta + r_theta * t, b0.phi + r_phi * t,
                                             b0.alpha + r_alpha * t, beta0 + r_beta * t);
    r.dkappa_rel[i] = r_kappa;
    r.omega_phi[i] = r_phi;
    r.omega_theta[i] = r_theta;
    r.omega_alpha[i] = r_alpha;
    r.omega_beta[i] = r_beta;
  }
  out.signal = ellipse_synthesize(out.states);
  return out;
}

// ---------------------------------------------------------------------------
// composite record: linear motion followed by circular motion

enum class SegmentKind { linear, circular };

struct CompositeSegment {
  SegmentKind kind = SegmentKind::linear;
  std::size_t length = 400;
  double amplitude = 1.0;  // semi-major axis
  double omega = 0.1;      // carrier, rad/sample
};

struct CompositeSpec {
  std::vector<CompositeSegment> segments;
  std::size_t taper_len = 0;  // raised-cosine ramp at each segment end; 0 concatenates exactly
  double noise_level = 0.0;   // noise RMS / signal RMS
  std::uint64_t seed = 0;
};

struct SegmentTruth {
  SegmentKind kind;
  std::size_t start = 0;
  std::size_t length = 0;
  std::vector<EllipseState> states;
  Vec3 normal{};  // unit normal of the ellipse plane
};

struct CompositeSignal {
  RealSignal3 signal;
  std::vector<SegmentTruth> truth;
};

/// Linear segments oscillate along y (b = 0.02 a); circular segments turn in
/// the x-z plane with unit normal +y.
inline EllipseState composite_segment_state(const CompositeSegment& seg, double phase) {
  if (seg.kind == SegmentKind::linear)
    return EllipseState::from_axes(seg.amplitude, 0.02 * seg.amplitude, kPi / 2.0, phase, 0.0, 0.0);
  return EllipseState::from_axes(seg.amplitude, seg.amplitude, 0.0, phase, kPi, kPi / 2.0);
}

inline CompositeSignal make_composite_seismic_like(const CompositeSpec& spec) {
  if (spec.segments.empty()) throw InputError("composite needs at least one segment");
  if (!(spec.noise_level >= 0.0)) throw InputError("noise level must be non-negative");
  for (const auto& s : spec.segments)
    if (s.length <= 2 * spec.taper_len || s.length < 2)
      throw InputError("segment length must exceed twice the taper length");

  std::size_t total = 0;
  std::vector<std::size_t> starts;
  for (std::size_t k = 0; k < spec.segments.size(); ++k) {
    const std::size_t start = (k == 0) ? 0 : total - spec.taper_len;
    starts.push_back(start);
    total = start + spec.segments[k].length;
  }

  std::vector<Vec3> x(total, Vec3{0.0, 0.0, 0.0});
  std::vector<SegmentTruth> truth;
  const double ramp = static_cast<double>(spec.taper_len);
  for (std::size_t k = 0; k < spec.segments.size(); ++k) {
    const auto& seg = spec.segments[k];
    SegmentTruth tr{seg.kind, starts[k], seg.length, {}, {}};
    tr.states.reserve(seg.length);
    for (std::size_t i = 0; i < seg.length; ++i) {
      const EllipseState st = composite_segment_state(seg, seg.omega * static_cast<double>(i));
      tr.states.push_back(st);
      double env = 1.0;
      if (spec.taper_len > 0) {
        const double head = static_cast<double>(i) + 0.5;
        const double tail = static_cast<double>(seg.length - i) - 0.5;
        const double d = std::min(head, tail);
        if (d < ramp) env = 0.5 - 0.5 * std::cos(kPi * d / ramp);
      }
      const Vec3 v = real_part(ellipse_sample(st));
      for (int c = 0; c < 3; ++c) x[starts[k] + i][c] += env * v[c];
    }
    const auto& s0 = tr.states.front();
    tr.normal = {std::sin(s0.alpha) * std::sin(s0.beta), -std::cos(s0.alpha) * std::sin(s0.beta),
                 std::cos(s0.beta)};
    truth.push_back(std::move(tr));
  }

  if (spec.noise_level > 0.0) {
    double energy = 0.0;
    for (const auto& v : x) energy += dot(v, v);
    const double rms = std::sqrt(energy / (3.0 * static_cast<double>(total)));
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, spec.noise_level * rms);
    for (auto& v : x)
      for (int c = 0; c < 3; ++c) v[c] += gauss(rng);
  }
  return CompositeSignal{RealSignal3(std::move(x)), std::move(truth)};
}

}  // namespace trivar
