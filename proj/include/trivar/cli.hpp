#pragma once

// Command-line front end. Kept out of trivar.hpp because it pulls in CLI11
// and nlohmann::json.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "trivar/io.hpp"
#include "trivar/pipeline.hpp"
#include "trivar/spectrum.hpp"
#include "trivar/synth.hpp"

namespace trivar::cli {

namespace fs = std::filesystem;

struct Options {
  RunConfig cfg;
  std::string input;
  std::string out;
  std::optional<double> dt;
  std::string scheme = "central4";
  std::string columns;
  std::string time_column = "t";

  // synth
  std::string mode = "amplitude";
  std::size_t n = 800;
  double omega_bar = kPi / 100.0;
  double upsilon = 2.5e-4 * kPi;
  std::uint64_t seed = 0;
  double noise = 0.0;
};

namespace detail {

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InputError(p.string() + ": cannot open for writing");
  return f;
}

inline fs::path prepare_dir(const std::string& dir) {
  if (dir.empty()) throw InputError("--out is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError(dir + ": cannot create directory: " + ec.message());
  return fs::path(dir);
}

inline Dataset load(const Options& o) {
  CsvOptions csv;
  csv.dt = o.dt;
  csv.time_column = o.time_column;
  if (!o.columns.empty()) {
    std::array<std::string, 3> cols;
    std::stringstream ss(o.columns);
    std::string item;
    int c = 0;
    while (std::getline(ss, item, ',')) {
      if (c == 3) throw InputError("--columns takes exactly three names");
      cols[c++] = item;
    }
    if (c != 3) throw InputError("--columns takes exactly three names");
    csv.columns = cols;
  }
  return read_csv_file(o.input, csv);
}

inline RunConfig config(const Options& o) {
  RunConfig cfg = o.cfg;
  if (o.scheme == "central4")
    cfg.scheme = DerivativeScheme::central4;
  else if (o.scheme == "spectral")
    cfg.scheme = DerivativeScheme::spectral;
  else
    throw InputError("unknown derivative scheme '" + o.scheme + "' (central4 or spectral)");
  cfg.validate();
  return cfg;
}

inline double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

inline void write_json(const fs::path& p, const nlohmann::ordered_json& j) {
  auto f = open_out(p);
  f << j.dump(2) << '\n';
}

}  // namespace detail

inline int cmd_analyze(const Options& o, std::ostream& out) {
  const RunConfig cfg = detail::config(o);
  const Dataset ds = detail::load(o);
  const RealSignal3 x = rotate_to_bearing(RealSignal3(ds.channels, ds.dt), cfg.bearing_deg);
  const Analysis a = analyze(x, cfg);
  const fs::path dir = detail::prepare_dir(o.out);

  {
    auto f = detail::open_out(dir / "analysis.csv");
    CsvWriter w(f, {"t", "kappa", "lambda", "theta", "phi", "alpha", "beta", "nhat_x", "nhat_y",
                    "nhat_z", "omega", "sigma2", "upsilon2", "term_amplitude", "term_deformation",
                    "term_precession", "term_normal", "flags"});
    const auto& s = a.ellipse.states;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Vec3& nh = a.ellipse.normals.n_hat[i];
      w.row(ds.time[i], s.kappa[i], s.lambda[i], s.theta[i], s.phi[i], s.alpha[i], s.beta[i], nh[0],
            nh[1], nh[2], a.moments.omega[i], a.moments.sigma2[i], a.moments.upsilon2[i],
            a.terms.term_amplitude[i], a.terms.term_deformation[i], a.terms.term_precession[i],
            a.terms.term_normal[i], static_cast<unsigned>(a.flags[i]));
    }
  }
  {
    auto f = detail::open_out(dir / "sphere_x.csv");
    CsvWriter w(f, {"t", "x", "y", "z"});
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = norm(x[i]);
      const Vec3 u = r > 0.0 ? scaled(x[i], 1.0 / r) : Vec3{0.0, 0.0, 0.0};
      w.row(ds.time[i], u[0], u[1], u[2]);
    }
  }
  {
    auto f = detail::open_out(dir / "sphere_n.csv");
    CsvWriter w(f, {"t", "x", "y", "z", "degenerate"});
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Vec3& nh = a.ellipse.normals.n_hat[i];
      w.row(ds.time[i], nh[0], nh[1], nh[2], a.ellipse.normals.degenerate[i] ? 1 : 0);
    }
  }

  const auto& tm = a.time_moments;
  const auto& sm = a.spectral_moments;
  nlohmann::ordered_json j;
  j["energy"] = sm.energy;
  j["mean_freq_time"] = tm.mean_freq;
  j["mean_freq_spectral"] = sm.mean_freq;
  j["second_central_time"] = tm.second_central;
  j["second_central_spectral"] = sm.second_central;
  j["flags_excluded"] = a.flags_excluded;
  j["mean_freq_discrepancy"] = detail::relative_gap(tm.mean_freq, sm.mean_freq);
  j["second_central_discrepancy"] = detail::relative_gap(tm.second_central, sm.second_central);
  j["mean_freq_time_cycles"] = tm.mean_freq / (2.0 * kPi);
  j["mean_freq_spectral_cycles"] = sm.mean_freq / (2.0 * kPi);
  j["n_samples"] = x.size();
  j["dt"] = x.dt();
  j["bearing_deg"] = cfg.bearing_deg;
  j["channels"] = ds.names;
  j["scheme"] = o.scheme;
  detail::write_json(dir / "summary.json", j);

  out << "samples            " << x.size() << " (" << a.flags_excluded << " excluded from averages)\n"
      << std::setprecision(6) << "mean frequency     time " << tm.mean_freq << " rad ("
      << tm.mean_freq / (2.0 * kPi) << " cycles), spectral " << sm.mean_freq << " rad ("
      << sm.mean_freq / (2.0 * kPi) << " cycles) per unit time\n"
      << "second moment      time " << tm.second_central << ", spectral " << sm.second_central
      << "\n"
      << "bearing            " << cfg.bearing_deg << " deg\n";
  return 0;
}

inline int cmd_spectrum(const Options& o, std::ostream& out) {
  const RunConfig cfg = detail::config(o);
  const Dataset ds = detail::load(o);
  const RealSignal3 x = rotate_to_bearing(RealSignal3(ds.channels, ds.dt), cfg.bearing_deg);
  const TaperSet tapers = slepian_tapers(x.size(), cfg.taper_p, cfg.tapers);
  const JointSpectrum s = multitaper_joint_spectrum(x, tapers, cfg.pad_factor);
  const double integral = spectrum_integral(s);
  const fs::path dir = detail::prepare_dir(o.out);

  {
    auto f = detail::open_out(dir / "spectrum.csv");
    CsvWriter w(f, {"freq_rad", "freq_cycles", "S"});
    for (std::size_t k = 0; k < s.freqs.size(); ++k) w.row(s.freqs[k], s.freqs[k] / (2.0 * kPi), s.values[k]);
  }
  nlohmann::ordered_json j;
  j["mean_freq"] = s.moments.mean_freq;
  j["mean_freq_cycles"] = s.moments.mean_freq / (2.0 * kPi);
  j["second_central"] = s.moments.second_central;
  j["normalization"] = integral;
  j["time_bandwidth"] = cfg.taper_p;
  j["tapers"] = cfg.tapers;
  j["concentrations"] = tapers.concentrations;
  j["pad_factor"] = cfg.pad_factor;
  j["n_samples"] = x.size();
  j["dt"] = x.dt();
  detail::write_json(dir / "spectrum_summary.json", j);

  out << std::setprecision(10) << "mean_freq " << s.moments.mean_freq << " rad ("
      << s.moments.mean_freq / (2.0 * kPi) << " cycles) second_central " << s.moments.second_central
      << " normalization " << integral << '\n';
  return 0;
}

inline int cmd_synth(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw InputError("--out is required");
  if (!(o.noise >= 0.0)) throw InputError("--noise must be non-negative");
  const fs::path path(o.out);
  if (path.has_parent_path()) detail::prepare_dir(path.parent_path().string());
  fs::path truth_path = path;
  truth_path += ".truth.csv";

  std::vector<Vec3> x;
  if (o.mode == "composite") {
    CompositeSpec spec;
    const std::size_t half = o.n / 2;
    spec.segments = {{SegmentKind::linear, half, 1.0, 2.0 * kPi * 0.02},
                     {SegmentKind::circular, o.n - half + 50, 1.0, 2.0 * kPi * 0.02}};
    spec.taper_len = 50;
    spec.noise_level = o.noise;
    spec.seed = o.seed;
    const CompositeSignal c = make_composite_seismic_like(spec);
    x = c.signal.samples();
    auto f = detail::open_out(truth_path);
    CsvWriter w(f, {"segment", "kind", "start", "length", "n_x", "n_y", "n_z"});
    for (std::size_t k = 0; k < c.truth.size(); ++k) {
      const auto& t = c.truth[k];
      w.row(k, t.kind == SegmentKind::linear ? 0 : 1, t.start, t.length, t.normal[0], t.normal[1], t.normal[2]);
    }
  } else {
    SynthSpec spec;
    spec.mode = parse_synth_mode(o.mode);
    spec.n_samples = o.n;
    spec.omega_bar = o.omega_bar;
    spec.upsilon = o.upsilon;
    const SingleRateSignal sig = make_single_rate_signal(spec);
    x = sig.signal.real_trajectory();
    if (o.noise > 0.0) {
      double energy = 0.0;
      for (const auto& v : x) energy += dot(v, v);
      const double rms = std::sqrt(energy / (3.0 * static_cast<double>(x.size())));
      std::mt19937_64 rng(o.seed);
      std::normal_distribution<double> gauss(0.0, o.noise * rms);
      for (auto& v : x)
        for (int c = 0; c < 3; ++c) v[c] += gauss(rng);
    }
    auto f = detail::open_out(truth_path);
    CsvWriter w(f, {"t", "a", "b", "kappa", "lambda", "theta", "phi", "alpha", "beta", "dkappa_rel",
                    "dlambda", "omega_phi", "omega_theta", "omega_alpha", "omega_beta"});
    const auto& r = sig.rates;
    for (std::size_t i = 0; i < sig.states.size(); ++i) {
      const auto& s = sig.states[i];
      w.row(static_cast<double>(i), s.a, s.b, s.kappa, s.lambda, s.theta, s.phi, s.alpha, s.beta,
            r.dkappa_rel[i], r.dlambda[i], r.omega_phi[i], r.omega_theta[i], r.omega_alpha[i],
            r.omega_beta[i]);
    }
  }

  auto f = detail::open_out(path);
  CsvWriter w(f, {"t", "x", "y", "z"});
  for (std::size_t i = 0; i < x.size(); ++i) w.row(static_cast<double>(i), x[i][0], x[i][1], x[i][2]);
  out << "wrote " << x.size() << " samples to " << path.string() << '\n';
  return 0;
}

/// Parses argv and runs one subcommand. Exit status: 0 success, 2 bad input
/// or usage, 3 numerical failure.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polarization and modulation analysis of three-component records"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--dt", o.dt, "Sample interval (overrides the time column)");
    sub->add_option("--bearing", o.cfg.bearing_deg, "Rotate horizontally so x points along this bearing (degrees)");
    sub->add_option("--scheme", o.scheme, "Derivative scheme: central4 or spectral");
    sub->add_option("--trim", o.cfg.edge_fraction, "Fraction of samples flagged as edge at each end");
    sub->add_option("--taper-p", o.cfg.taper_p, "Multitaper time-bandwidth product");
    sub->add_option("--tapers", o.cfg.tapers, "Number of tapers");
    sub->add_option("--pad", o.cfg.pad_factor, "Zero-padding factor for the multitaper spectrum");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--eps-lin", o.cfg.eps_lin, "Degeneracy threshold on |n| / kappa^2");
    sub->add_option("--eps-pow", o.cfg.eps_pow, "Low-power threshold relative to peak power");
    sub->add_option("--columns", o.columns, "Three channel names, comma separated");
    sub->add_option("--time-column", o.time_column, "Name of the time column");
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "Per-sample ellipse parameters, moments and bandwidth terms");
  analyze_cmd->add_option("input", o.input, "CSV file")->required();
  analyze_cmd->add_option("--out", o.out, "Output directory")->required();
  add_common(analyze_cmd);

  auto* spectrum_cmd = app.add_subcommand("spectrum", "Multitaper joint spectrum");
  spectrum_cmd->add_option("input", o.input, "CSV file")->required();
  spectrum_cmd->add_option("--out", o.out, "Output directory")->required();
  add_common(spectrum_cmd);

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic record");
  synth_cmd->add_option("--mode", o.mode,
                        "amplitude, internal_precession, deformation, nutation, azimuth, "
                        "fixed_geometry or composite");
  synth_cmd->add_option("--n", o.n, "Number of samples");
  synth_cmd->add_option("--omega-bar", o.omega_bar, "Instantaneous frequency, rad/sample");
  synth_cmd->add_option("--upsilon", o.upsilon, "Instantaneous bandwidth, rad/sample");
  synth_cmd->add_option("--seed", o.seed, "Noise seed");
  synth_cmd->add_option("--noise", o.noise, "Noise RMS relative to signal RMS");
  synth_cmd->add_option("--out", o.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(o, out);
    if (*spectrum_cmd) return cmd_spectrum(o, out);
    if (*synth_cmd) return cmd_synth(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace trivar::cli
