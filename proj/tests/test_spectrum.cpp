#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "support.hpp"
#include "trivar/spectrum.hpp"

using namespace trivar;
using namespace trivar::testing;

namespace {

int sign_changes(const std::vector<double>& v) {
  int count = 0;
  double prev = 0.0;
  for (double x : v) {
    if (std::abs(x) < 1e-12) continue;
    if (prev != 0.0 && (x > 0) != (prev > 0)) ++count;
    prev = x;
  }
  return count;
}

RealSignal3 white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vec3> x(n);
  for (auto& v : x) v = {g(rng), g(rng), g(rng)};
  return RealSignal3(std::move(x));
}

}  // namespace

TEST(SlepianTapers, OrthonormalConcentratedAndOrdered) {
  const auto t = slepian_tapers(800, 2.0, 3);
  ASSERT_EQ(t.count(), 3u);
  ASSERT_EQ(t.length(), 800u);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      double d = 0.0;
      for (std::size_t i = 0; i < 800; ++i) d += t.tapers[a][i] * t.tapers[b][i];
      EXPECT_NEAR(d, a == b ? 1.0 : 0.0, 1e-10);
    }
    EXPECT_GT(t.concentrations[a], 0.9);
    EXPECT_EQ(sign_changes(t.tapers[a]), static_cast<int>(a));
    EXPECT_GT(t.tapers[a][0], 0.0);
  }
  EXPECT_GT(t.concentrations[0], t.concentrations[1]);
  EXPECT_GT(t.concentrations[1], t.concentrations[2]);
}

TEST(SlepianTapers, EvenAndOddSymmetry) {
  const auto t = slepian_tapers(257, 3.0, 5);
  for (std::size_t k = 0; k < 5; ++k) {
    const double s = (k % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < 257; ++i) EXPECT_NEAR(t.tapers[k][i], s * t.tapers[k][256 - i], 1e-10);
  }
}

TEST(SlepianTapers, MatchDenseConcentrationProblem) {
  // The tapers are the top eigenvectors of the sinc kernel matrix whose
  // eigenvalues are the band concentrations.
  const std::size_t n = 128;
  const double p = 3.0, w = p / static_cast<double>(n);
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = static_cast<double>(i) - static_cast<double>(j);
      a(i, j) = (i == j) ? 2.0 * w : std::sin(2.0 * kPi * w * d) / (kPi * d);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const auto t = slepian_tapers(n, p, 5);
  for (std::size_t k = 0; k < 5; ++k) {
    Eigen::VectorXd v = es.eigenvectors().col(static_cast<Eigen::Index>(n - 1 - k));
    if (v(0) < 0) v = -v;
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(t.tapers[k][i], v(static_cast<Eigen::Index>(i)), 1e-8);
    EXPECT_NEAR(t.concentrations[k], es.eigenvalues()(static_cast<Eigen::Index>(n - 1 - k)), 1e-9);
  }
}

TEST(SlepianTapers, RejectsBadArguments) {
  EXPECT_THROW(slepian_tapers(63, 2.0, 3), InputError);
  EXPECT_THROW(slepian_tapers(800, 2.0, 4), InputError);
  EXPECT_THROW(slepian_tapers(800, 0.0, 1), InputError);
  EXPECT_THROW(slepian_tapers(800, 2.0, 0), InputError);
  EXPECT_NO_THROW(slepian_tapers(64, 2.0, 3));
}

TEST(MultitaperSpectrum, ExactBinCosinePeaksAtCarrier) {
  const std::size_t n = 800;
  const double w0 = 2.0 * kPi * 40.0 / n;
  std::vector<Vec3> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = {std::cos(w0 * i), 0.5 * std::sin(w0 * i), 0.0};
  const auto s = multitaper_joint_spectrum(RealSignal3(x), slepian_tapers(n, 2.0, 3));
  const auto top = std::max_element(s.values.begin(), s.values.end()) - s.values.begin();
  EXPECT_NEAR(s.freqs[static_cast<std::size_t>(top)], w0, 1e-12);
  EXPECT_NEAR(s.moments.mean_freq, w0, 3e-3 * w0);  // taper sidelobes bias the mean slightly
  EXPECT_NEAR(spectrum_integral(s), 1.0, 1e-10);
}

TEST(MultitaperSpectrum, NormalizedAndScaledWithSpacing) {
  const auto x = random_real_packet(4, 1024);
  const auto tapers = slepian_tapers(1024, 2.0, 3);
  const auto s = multitaper_joint_spectrum(x, tapers);
  EXPECT_NEAR(spectrum_integral(s), 1.0, 1e-10);
  EXPECT_NEAR(s.freqs.back(), kPi, 1e-12);

  const RealSignal3 slow(x.samples(), 0.25);
  const auto s2 = multitaper_joint_spectrum(slow, tapers);
  EXPECT_NEAR(spectrum_integral(s2), 1.0, 1e-10);
  EXPECT_NEAR(s2.freqs.back(), 4.0 * kPi, 1e-12);
  EXPECT_NEAR(s2.moments.mean_freq, 4.0 * s.moments.mean_freq, 1e-10);
}

TEST(MultitaperSpectrum, InvariantUnderRotation) {
  std::mt19937_64 rng(9);
  const auto x = random_real_packet(2, 1024);
  const auto tapers = slepian_tapers(1024, 2.0, 3);
  const auto s = multitaper_joint_spectrum(x, tapers);
  for (int trial = 0; trial < 5; ++trial) {
    const auto r = multitaper_joint_spectrum(rotate_frame(x, random_rotation(rng)), tapers);
    double peak = 0.0, diff = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      peak = std::max(peak, s.values[k]);
      diff = std::max(diff, std::abs(s.values[k] - r.values[k]));
    }
    EXPECT_LT(diff / peak, 1e-10);
  }
}

TEST(MultitaperSpectrum, WhiteNoiseIsRoughlyFlat) {
  const auto s = multitaper_joint_spectrum(white_noise(4096, 3), slepian_tapers(4096, 4.0, 7), 1);
  // block averages over 64 bins away from DC and Nyquist
  double lo = INFINITY, hi = 0.0;
  for (std::size_t start = 64; start + 128 < s.values.size(); start += 64) {
    double acc = 0.0;
    for (std::size_t k = start; k < start + 64; ++k) acc += s.values[k];
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  EXPECT_LT(hi / lo, 2.0);
}

TEST(MultitaperSpectrum, RejectsMismatchAndZeroSignal) {
  const auto tapers = slepian_tapers(128, 2.0, 3);
  EXPECT_THROW(multitaper_joint_spectrum(white_noise(256, 1), tapers), InputError);
  EXPECT_THROW(multitaper_joint_spectrum(RealSignal3(std::vector<Vec3>(128, Vec3{})), tapers),
               NumericalError);
}
