#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "kdsim/analytic.hpp"
#include "kdsim/fit.hpp"
#include "oracles.hpp"

using namespace kdsim;

namespace {

const std::vector<int> kOrders{0, 1, 2, 3, 4};

ObservedPattern from_pattern(const DiffractionPattern& p, const std::vector<int>& orders, double sigma) {
  ObservedPattern obs;
  obs.alpha = p.alpha;
  for (int k : orders) obs.records.push_back({k, p.at(k), sigma});
  return obs;
}

ObservedPattern noiseless(double alpha, double r) {
  return synthesize_gaussian(alpha, r, kOrders, GaussianNoise{0.0, 1e-4}, 0);
}

double width(const FitResult& f) { return f.r_hi - f.r_lo; }

}  // namespace

TEST(ChiSquare, FrozenValue) {
  ObservedPattern obs;
  obs.alpha = 2.0;
  for (int p : kOrders) {
    const double j = oracle::bessel_series(p, 2.0);
    obs.records.push_back({p, j * j, 0.01});
  }
  // (J_p(2)^2 - J_p(1)^2)^2 / 0.01^2 summed with 50-digit Bessel values
  EXPECT_NEAR(chi_square(obs, 0.5), 3186.1585920535, 1e-7);
  EXPECT_NEAR(chi_square(obs, 1.0), 0.0, 1e-20);
  for (double r = 0.0; r <= 2.0; r += 0.05) EXPECT_GE(chi_square(obs, r), 0.0);
  EXPECT_THROW(chi_square(obs, -0.1), DomainError);
}

TEST(ObservedPattern, Validation) {
  ObservedPattern obs = noiseless(1.0, 1.0);
  EXPECT_NO_THROW(obs.validate());
  obs.records[0].sigma = 0.0;
  EXPECT_THROW(obs.validate(), DomainError);
  obs = noiseless(1.0, 1.0);
  obs.records[1].value = 1.2;
  EXPECT_THROW(obs.validate(), DomainError);
  obs = noiseless(1.0, 1.0);
  obs.records.resize(2);
  EXPECT_THROW(obs.validate(), DomainError);
}

TEST(Fit, NoiselessRecovery) {
  for (double alpha : {1.0, 2.0, 5.0}) {
    for (double r : {0.25, 0.5, 0.8, 1.0}) {
      const FitResult f = fit_effective_amplitude(noiseless(alpha, r));
      EXPECT_NEAR(f.r_eff_hat, r, 1e-6) << alpha << " " << r;
      EXPECT_NEAR(f.chi2_min, 0.0, 1e-6);
      EXPECT_LE(f.r_lo, f.r_eff_hat);
      EXPECT_GE(f.r_hi, f.r_eff_hat);
      EXPECT_FALSE(f.misfit);
      EXPECT_EQ(f.dof, 4);
      EXPECT_EQ(f.scan.size(), 401u);
    }
  }
}

TEST(Fit, NoisyRecoveryAcrossSeeds) {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const FitResult f = fit_effective_amplitude(synthesize_gaussian(2.0, 1.0, kOrders, GaussianNoise{}, seed));
    if (std::abs(f.r_eff_hat - 1.0) <= 0.02) ++hits;
  }
  EXPECT_GE(hits, 190);
}

TEST(Fit, ConfidenceIntervalBracketsTruthMostOfTheTime) {
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const FitResult f = fit_effective_amplitude(synthesize_gaussian(2.0, 0.8, kOrders, GaussianNoise{}, seed));
    if (f.r_lo <= 0.8 && 0.8 <= f.r_hi) ++covered;
    EXPECT_NEAR(chi_square(synthesize_gaussian(2.0, 0.8, kOrders, GaussianNoise{}, seed), f.r_lo),
                f.chi2_min + 1.0, 1e-6);
  }
  // 68% nominal coverage for delta chi2 = 1
  EXPECT_GE(covered, 120);
  EXPECT_LE(covered, 160);
}

TEST(Fit, MomentDegeneracy) {
  // (d, q) = (0.3, 0.1) and point-like both give r_eff = 1
  const auto a = distribution_pattern(2.0, MomentSet::dipole_quadrupole(0.3, 0.1));
  const auto b = distribution_pattern(2.0, MomentSet::dipole_quadrupole(0.0, 0.0));
  const FitResult fa = fit_effective_amplitude(from_pattern(a, kOrders, 0.01));
  const FitResult fb = fit_effective_amplitude(from_pattern(b, kOrders, 0.01));
  ASSERT_EQ(fa.scan.size(), fb.scan.size());
  for (std::size_t i = 0; i < fa.scan.size(); ++i) {
    EXPECT_NEAR(fa.scan[i].chi2, fb.scan[i].chi2, 1e-12 * std::max(1.0, fb.scan[i].chi2));
  }
  EXPECT_NEAR(fa.r_eff_hat, fb.r_eff_hat, 1e-8);
  EXPECT_NEAR(fa.r_eff_hat, 1.0, 1e-6);
}

TEST(Fit, ChiSquareSeesOnlyEffectiveAmplitude) {
  // score one dataset against two moment families sharing r_eff at every point
  const ObservedPattern obs = synthesize_gaussian(2.0, 0.7, kOrders, GaussianNoise{}, 8);
  auto chi2_against = [&](const MomentSet& m) {
    const auto model = distribution_pattern(obs.alpha, m);
    double c = 0.0;
    for (const auto& rec : obs.records) {
      const double z = (rec.value - model.at(rec.order)) / rec.sigma;
      c += z * z;
    }
    return c;
  };
  for (double r = 0.05; r < 1.0; r += 0.05) {
    const double theta = 0.3 + r;
    const MomentSet quad = MomentSet::dipole_quadrupole(0.0, 0.5 * (1.0 - r));
    const MomentSet mixed = MomentSet::dipole_quadrupole(0.5 * r * std::sin(theta), 0.5 * (1.0 - r * std::cos(theta)));
    const double c1 = chi2_against(quad);
    const double c2 = chi2_against(mixed);
    EXPECT_NEAR(c1, c2, 1e-12 * std::max(1.0, c1)) << r;
    EXPECT_NEAR(c1, chi_square(obs, r), 1e-12 * std::max(1.0, c1)) << r;
  }
}

TEST(Fit, ScaleCoherence) {
  // data at (alpha, r) and (2 alpha, r / 2) share chi2 profiles under r -> r / 2
  const ObservedPattern a = synthesize_gaussian(1.5, 0.9, kOrders, GaussianNoise{}, 42);
  ObservedPattern b = a;
  b.alpha = 3.0;
  for (double r = 0.0; r <= 2.0; r += 0.01) EXPECT_NEAR(chi_square(a, r), chi_square(b, 0.5 * r), 1e-9);
  FitOptions wide;
  wide.r_max = 4.0;
  const FitResult fa = fit_effective_amplitude(a, wide);
  const FitResult fb = fit_effective_amplitude(b);
  EXPECT_NEAR(fb.r_eff_hat, 0.5 * fa.r_eff_hat, 1e-7);
}

TEST(Fit, OptionValidation) {
  const ObservedPattern obs = noiseless(2.0, 1.0);
  FitOptions o;
  o.scan_points = 199;
  EXPECT_THROW(fit_effective_amplitude(obs, o), DomainError);
  o = {};
  o.r_max = 0.0;
  EXPECT_THROW(fit_effective_amplitude(obs, o), DomainError);
  o = {};
  o.delta_chi2 = 0.0;
  EXPECT_THROW(fit_effective_amplitude(obs, o), DomainError);
}

TEST(Fit, UnboundedWhenTruthOutsideScan) {
  FitOptions o;
  o.r_max = 0.7;
  const FitResult f = fit_effective_amplitude(noiseless(2.0, 1.0), o);
  EXPECT_TRUE(f.unbounded);
  EXPECT_NEAR(f.r_eff_hat, 0.7, 1e-12);
  EXPECT_FALSE(f.notes.empty());
}

TEST(Fit, MultimodalFlag) {
  // a single far order is ambiguous along the oscillating Bessel tail
  const auto p = pointlike_pattern(6.0);
  const ObservedPattern obs = from_pattern(p, {0, 5, 7}, 0.05);
  const FitResult f = fit_effective_amplitude(obs);
  EXPECT_TRUE(f.multimodal);
  EXPECT_GT(f.local_minima.size(), 1u);
  EXPECT_NEAR(f.r_eff_hat, 1.0, 1e-6);
}

TEST(JointFit, SharedAmplitude) {
  const ObservedPattern a = synthesize_gaussian(1.0, 0.8, kOrders, GaussianNoise{}, 3);
  const ObservedPattern b = synthesize_gaussian(3.0, 0.8, kOrders, GaussianNoise{}, 4);
  const FitResult fa = fit_effective_amplitude(a);
  const FitResult fb = fit_effective_amplitude(b);
  const FitResult joint = joint_fit({a, b});
  EXPECT_NEAR(joint.r_eff_hat, 0.8, 0.01);
  EXPECT_EQ(joint.dof, 9);
  EXPECT_FALSE(joint.misfit);
  EXPECT_LE(width(joint), std::min(width(fa), width(fb)) + 1e-12);
  for (const auto& s : joint.scan) EXPECT_NEAR(s.chi2, chi_square(a, s.r_eff) + chi_square(b, s.r_eff), 1e-9);

  const FitResult single = joint_fit({a});
  EXPECT_EQ(single.r_eff_hat, fa.r_eff_hat);
  EXPECT_THROW(joint_fit({}), DomainError);
}

TEST(JointFit, NoiselessRecovery) {
  const FitResult joint = joint_fit({noiseless(1.0, 0.8), noiseless(3.0, 0.8)});
  EXPECT_NEAR(joint.r_eff_hat, 0.8, 1e-6);
  EXPECT_FALSE(joint.multimodal && joint.unbounded);
}

TEST(JointFit, InconsistentDatasetsAreFlagged) {
  const ObservedPattern a = synthesize_gaussian(1.0, 0.8, kOrders, GaussianNoise{}, 5);
  const ObservedPattern b = synthesize_gaussian(3.0, 0.5, kOrders, GaussianNoise{}, 6);
  const FitResult joint = joint_fit({a, b});
  EXPECT_TRUE(joint.misfit);
}

TEST(GoldenSection, FindsQuadraticMinimum) {
  const double x = golden_section_minimize([](double t) { return (t - 0.3) * (t - 0.3); }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(x, 0.3, 1e-8);
  const double edge = golden_section_minimize([](double t) { return t; }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(edge, 0.0, 1e-9);
}

TEST(MomentRegion, UnitAmplitudeArc) {
  FitResult f;
  f.r_lo = 1.0;
  f.r_hi = 1.0;
  const MomentRegion region = moment_region(f, 721);
  EXPECT_FALSE(region.empty);
  ASSERT_FALSE(region.inner.empty());
  auto nearest = [&](double d, double q) {
    double best = 1e9;
    for (const auto& [sd, sq] : region.inner) best = std::min(best, std::hypot(sd - d, sq - q));
    return best;
  };
  EXPECT_LE(nearest(0.0, 0.0), 1e-12);
  EXPECT_LE(nearest(0.3, 0.1), 5e-3);
  EXPECT_TRUE(region.contains(0.3, 0.1));
  EXPECT_TRUE(region.contains(0.0, 0.0));
  EXPECT_FALSE(region.contains(0.1, 0.1));
}

TEST(MomentRegion, NarrowBandContainsPointLike) {
  FitResult f;
  f.r_lo = 0.999;
  f.r_hi = 1.001;
  const MomentRegion region = moment_region(f, 721);
  EXPECT_TRUE(region.contains(0.0, 0.0));
  EXPECT_FALSE(region.contains(0.0, 0.1));
  for (const auto* arc : {&region.inner, &region.outer}) {
    for (const auto& [d, q] : *arc) {
      EXPECT_TRUE(region.contains(d, q));
      EXPECT_GE(d, 0.0);
      EXPECT_LT(d, 1.0);
      EXPECT_GE(q, 0.0);
      EXPECT_LT(q, 1.0);
    }
  }
}

TEST(MomentRegion, BandBeyondSquareIsEmpty) {
  // brute-force supremum of r_eff over the square
  double sup = 0.0;
  for (int i = 0; i < 1000; ++i) {
    for (int j = 0; j < 1000; ++j) {
      const double d = i / 1000.0;
      const double q = j / 1000.0;
      sup = std::max(sup, std::hypot(1.0 - 2.0 * q, 2.0 * d));
    }
  }
  EXPECT_NEAR(sup, std::sqrt(5.0), 5e-3);
  EXPECT_LT(sup, 2.5);

  FitResult f;
  f.r_lo = 2.5;
  f.r_hi = 2.6;
  const MomentRegion region = moment_region(f, 721);
  EXPECT_TRUE(region.empty);
  EXPECT_TRUE(region.inner.empty());
  EXPECT_TRUE(region.outer.empty());
  ASSERT_FALSE(region.notes.empty());

  f.r_lo = 2.0;
  EXPECT_FALSE(moment_region(f, 721).empty);
  EXPECT_THROW(moment_region(f, 1), DomainError);
  f.r_hi = 1.0;
  EXPECT_THROW(moment_region(f, 721), DomainError);
}

TEST(Synthetic, GaussianIsSeeded) {
  const auto a = synthesize_gaussian(2.0, 1.0, kOrders, GaussianNoise{}, 9);
  const auto b = synthesize_gaussian(2.0, 1.0, kOrders, GaussianNoise{}, 9);
  const auto c = synthesize_gaussian(2.0, 1.0, kOrders, GaussianNoise{}, 10);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].value, b.records[i].value);
    EXPECT_GE(a.records[i].value, 0.0);
    EXPECT_LE(a.records[i].value, 1.0);
  }
  EXPECT_NE(a.records[0].value, c.records[0].value);
}

TEST(Synthetic, CountsRecoverAmplitude) {
  const ObservedPattern obs = synthesize_counts(2.0, 0.9, {-2, -1, 0, 1, 2}, 1000000, 17);
  double total = 0.0;
  for (const auto& r : obs.records) total += r.value;
  EXPECT_LE(total, 1.0);
  const FitResult f = fit_effective_amplitude(obs);
  EXPECT_NEAR(f.r_eff_hat, 0.9, 0.01);
  EXPECT_THROW(synthesize_counts(2.0, 1.0, kOrders, 0, 1), DomainError);
}
