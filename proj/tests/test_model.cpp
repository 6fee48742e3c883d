#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kdsim/model.hpp"

using namespace kdsim;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(DeriveScales, RecoilEnergyAtHardXRay) {
  const LaserSetup laser{1.0e-10, 1.0e12};
  const DimensionlessSetup s = derive_scales(laser, 1e-15);
  // hbar^2 k^2 / 2m with CODATA 2018 constants, evaluated by hand: 2.409867e-17 J (~150.4 eV)
  EXPECT_NEAR(s.recoil_energy_J, 2.409867e-17, 2.409867e-17 * 1e-6);
  EXPECT_NEAR(s.recoil_energy_J, 2.41e-17, 2.41e-17 * 5e-3);
  ASSERT_TRUE(s.wavelength_m.has_value());
  EXPECT_DOUBLE_EQ(*s.wavelength_m, 1.0e-10);
}

TEST(DeriveScales, WavenumberIsExact) {
  const LaserSetup laser{8.0e-7, 1.0};
  EXPECT_NEAR(laser.wavenumber() * laser.wavelength_m, 2.0 * kPi, 1e-15);
}

TEST(DeriveScales, ZeroFieldAndZeroTime) {
  const DimensionlessSetup zero_field = derive_scales({1e-6, 0.0}, 1e-12);
  EXPECT_EQ(zero_field.v0_V, 0.0);
  EXPECT_EQ(zero_field.u0, 0.0);
  EXPECT_EQ(zero_field.alpha, 0.0);

  const DimensionlessSetup zero_time = derive_scales({1e-6, 1e10}, 0.0);
  EXPECT_EQ(zero_time.tau, 0.0);
  EXPECT_EQ(zero_time.alpha, 0.0);
  EXPECT_GT(zero_time.u0, 0.0);
}

TEST(DeriveScales, AlphaAgreesWithSiRoute) {
  const ElectronConstants c;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lg(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const LaserSetup laser{1e-10 * std::pow(10.0, 3.0 * (lg(rng) + 1.0)), 1e10 * std::pow(10.0, 2.0 * lg(rng))};
    const double t = 1e-14 * std::pow(10.0, 2.0 * lg(rng));
    const DimensionlessSetup s = derive_scales(laser, t, c);
    const double si = c.charge_C * s.v0_V * t / (2.0 * c.hbar_Js);
    EXPECT_NEAR(s.alpha, si, 1e-12 * si);
    EXPECT_NEAR(s.alpha, 0.5 * s.u0 * s.tau, 1e-12 * s.alpha);
  }
}

TEST(DeriveScales, RejectsBadInput) {
  EXPECT_THROW(derive_scales({0.0, 1.0}, 1.0), DomainError);
  EXPECT_THROW(derive_scales({-1e-9, 1.0}, 1.0), DomainError);
  EXPECT_THROW(derive_scales({1e-9, -1.0}, 1.0), DomainError);
  EXPECT_THROW(derive_scales({1e-9, 1.0}, -1.0), DomainError);
  EXPECT_THROW(derive_scales({1e-9, NAN}, 1.0), DomainError);
  EXPECT_THROW(derive_scales({1e-9, 1.0}, INFINITY), DomainError);
  ElectronConstants bad;
  bad.mass_kg = 0.0;
  EXPECT_THROW(derive_scales({1e-9, 1.0}, 1.0, bad), DomainError);
}

TEST(MomentsFromSi, PermanentDipoleLimitIsNegligible) {
  const double e = ElectronConstants{}.charge_C;
  const MomentSet m = moments_from_si(e * 10.5e-30, 0.0, 6.2832e10, e);
  EXPECT_NEAR(m.dipole(), 6.59736e-19, 1e-24);
  EXPECT_EQ(m.quadrupole(), 0.0);
}

TEST(MomentsFromSi, Definitional) {
  const double e = ElectronConstants{}.charge_C;
  const double k = 3.0e9;
  EXPECT_TRUE(moments_from_si(0.0, 0.0, k, e).all_zero());
  EXPECT_DOUBLE_EQ(moments_from_si(e / (2.0 * k), 0.0, k, e).dipole(), 0.5);
  EXPECT_DOUBLE_EQ(moments_from_si(0.0, e / (k * k), k, e).quadrupole(), 1.0);
  EXPECT_THROW(moments_from_si(1.0, 1.0, 0.0, e), DomainError);
  EXPECT_THROW(moments_from_si(NAN, 1.0, k, e), DomainError);
}

TEST(BuildPotential, PointLike) {
  const PotentialSpec s = build_potential({});
  EXPECT_EQ(s.offset, 1.0);
  EXPECT_EQ(s.a_c, 1.0);
  EXPECT_EQ(s.a_s, 0.0);
  const PotentialSpec z = build_potential(MomentSet::dipole_quadrupole(0.0, 0.0));
  EXPECT_EQ(z.a_c, 1.0);
  EXPECT_EQ(z.a_s, 0.0);
}

TEST(BuildPotential, DipoleQuadrupoleMatchesThreeTermForm) {
  // U/(eV0/2) = 1 + cos 2x - 2 d sin 2x - 2 q cos 2x
  const PotentialSpec s = build_potential(MomentSet::dipole_quadrupole(0.3, 0.1));
  EXPECT_NEAR(s.a_c, 0.8, 1e-15);
  EXPECT_NEAR(s.a_s, -0.6, 1e-15);
  EXPECT_EQ(build_potential(MomentSet::dipole_quadrupole(0.0, 0.5)).a_c, 0.0);

  for (double d : {-0.7, 0.0, 0.125, 0.9}) {
    for (double q : {-0.3, 0.0, 0.25, 0.8}) {
      const PotentialSpec p = build_potential(MomentSet::dipole_quadrupole(d, q));
      EXPECT_EQ(p.a_c, 1.0 - 2.0 * q);
      EXPECT_EQ(p.a_s, -2.0 * d);
    }
  }
}

TEST(BuildPotential, HigherOrdersFollowDerivativeRule) {
  // q_3 contributes +(8/6) q_3 sin, q_4 contributes +(16/24) q_4 cos.
  const PotentialSpec s = build_potential(MomentSet{{0.0, 0.0, 0.3, 0.6}});
  EXPECT_NEAR(s.a_s, 0.3 * 8.0 / 6.0, 1e-15);
  EXPECT_NEAR(s.a_c, 1.0 + 0.6 * 16.0 / 24.0, 1e-15);
  const PotentialSpec t = build_potential(MomentSet{{0.0, 0.0, 0.0, 0.0, 1.0, 1.0}});
  EXPECT_NEAR(t.a_s, -32.0 / 120.0, 1e-15);
  EXPECT_NEAR(t.a_c, 1.0 - 64.0 / 720.0, 1e-15);
}

TEST(BuildPotential, MatchesTaylorSeriesOfShiftedPotential) {
  // sum_m q_m/m! f^(m)(x) with q_m = s^m is the Taylor series of f(x + s), f = 1 + cos 2x.
  const double shift = 0.05;
  MomentSet m;
  for (int k = 1; k <= 12; ++k) m.q_tilde.push_back(std::pow(shift, k));
  const PotentialSpec spec = build_potential(m);
  for (double x = -1.0; x <= 1.0; x += 0.1) {
    EXPECT_NEAR(evaluate_potential(spec, x), 1.0 + std::cos(2.0 * (x + shift)), 1e-14);
  }
}

TEST(EvaluatePotential, PointLikeValues) {
  const PotentialSpec s = build_potential({});
  EXPECT_DOUBLE_EQ(evaluate_potential(s, 0.0), 2.0);
  EXPECT_NEAR(evaluate_potential(s, kPi / 4.0), 1.0, 1e-15);
  for (int i = 0; i < 1000; ++i) {
    const double x = -5.0 + 10.0 * i / 999.0;
    const double c = std::cos(x);
    EXPECT_NEAR(evaluate_potential(s, x), 2.0 * c * c, 1e-14);
  }
}

TEST(EvaluatePotential, Periodic) {
  const PotentialSpec s = build_potential(MomentSet{{0.2, -0.1, 0.05}});
  for (double x = -3.0; x < 3.0; x += 0.37) {
    EXPECT_NEAR(evaluate_potential(s, x), evaluate_potential(s, x + kPi), 1e-12);
  }
}

TEST(CheckRegime, Thresholds) {
  DimensionlessSetup s;
  s.u0 = 1000.0;
  const RegimeReport ok = check_regime(s, MomentSet::dipole_quadrupole(0.3, 0.1));
  EXPECT_TRUE(ok.raman_nath_ok);
  EXPECT_TRUE(ok.ordering_ok);
  ASSERT_EQ(ok.moment_ratios.size(), 3u);
  EXPECT_EQ(ok.moment_ratios[0], 1.0);

  s.u0 = 5.0;
  EXPECT_FALSE(check_regime(s, {}).raman_nath_ok);
  s.u0 = 50.0;
  const RegimeReport marginal = check_regime(s, {});
  EXPECT_FALSE(marginal.raman_nath_ok);
  ASSERT_FALSE(marginal.notes.empty());
  EXPECT_NE(marginal.notes.front().find("marginal"), std::string::npos);
  s.u0 = 100.0;
  EXPECT_TRUE(check_regime(s, {}).raman_nath_ok);
}

TEST(CheckRegime, Ordering) {
  DimensionlessSetup s;
  s.u0 = 1e4;
  EXPECT_FALSE(check_regime(s, MomentSet::dipole_quadrupole(0.1, 0.2)).ordering_ok);
  EXPECT_FALSE(check_regime(s, MomentSet::dipole_quadrupole(0.0, 1.5)).ordering_ok);
  EXPECT_FALSE(check_regime(s, MomentSet::dipole_quadrupole(1.0, 0.0)).ordering_ok);
  EXPECT_TRUE(check_regime(s, MomentSet::dipole_quadrupole(0.0, 0.0)).ordering_ok);
  EXPECT_TRUE(check_regime(s, MomentSet::dipole_quadrupole(0.5, 0.0)).ordering_ok);
  EXPECT_TRUE(check_regime(s, MomentSet::dipole_quadrupole(-0.5, 0.25)).ordering_ok);
  EXPECT_FALSE(check_regime(s, MomentSet{{0.5, 0.2, 0.3}}).ordering_ok);
  // a vanishing dipole does not constrain the quadrupole
  EXPECT_TRUE(check_regime(s, MomentSet::dipole_quadrupole(0.0, 0.25)).ordering_ok);
  EXPECT_FALSE(check_regime(s, MomentSet{{0.0, 0.2, 0.3}}).ordering_ok);
}

TEST(CheckRegime, OrderingInvariantUnderShrinking) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DimensionlessSetup s;
  s.u0 = 1e3;
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    MomentSet m;
    const int order = 1 + static_cast<int>(u(rng) * 4);
    for (int k = 0; k < order; ++k) m.q_tilde.push_back(u(rng));
    if (!check_regime(s, m).ordering_ok) continue;
    ++checked;
    const double c = 0.01 + 0.98 * u(rng);
    for (double& q : m.q_tilde) q *= c;
    EXPECT_TRUE(check_regime(s, m).ordering_ok);
  }
  EXPECT_GT(checked, 50);
}

TEST(CheckRegime, ExplorableLengthIsWavelength) {
  const DimensionlessSetup s = derive_scales({1e-10, 1e14}, 1e-16);
  const RegimeReport r = check_regime(s, {});
  ASSERT_TRUE(r.explorable_length_m.has_value());
  EXPECT_DOUBLE_EQ(*r.explorable_length_m, 1e-10);
}
