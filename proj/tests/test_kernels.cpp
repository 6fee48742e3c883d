#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "kdsim/kernels.hpp"

using namespace kdsim::kernels;

namespace {

std::vector<cplx> random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

std::vector<double> random_reals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

class ThreadCounts : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(GetParam());
  }
  void TearDown() override { omp_set_num_threads(saved_); }
  int saved_ = 1;
};

}  // namespace

TEST_P(ThreadCounts, ApplyPhaseMatchesSerial) {
  auto a = random_state(1000, 1);
  auto b = a;
  const auto phase = random_reals(1000, 2);
  serial::apply_phase(a, phase, 0.37);
  omp::apply_phase(b, phase, 0.37);
  EXPECT_EQ(a, b);
}

TEST_P(ThreadCounts, MultiplyMatchesSerial) {
  auto a = random_state(777, 3);
  auto b = a;
  const auto f = random_state(777, 4);
  serial::multiply(a, f);
  omp::multiply(b, f);
  EXPECT_EQ(a, b);
}

TEST_P(ThreadCounts, NormIsBitwiseIndependentOfSchedule) {
  for (std::size_t n : {1u, 63u, 64u, 1024u, 4099u}) {
    const auto v = random_state(n, n);
    EXPECT_EQ(serial::norm_squared(v), omp::norm_squared(v)) << n;
    double naive = 0.0;
    for (const auto& z : v) naive += std::norm(z);
    EXPECT_NEAR(serial::norm_squared(v), naive, 1e-12 * naive);
  }
}

TEST_P(ThreadCounts, DftMatchesSerial) {
  const auto s = random_state(256, 5);
  std::vector<int> freqs;
  for (int m = -40; m <= 40; ++m) freqs.push_back(m);
  freqs.push_back(1000);
  EXPECT_EQ(serial::dft_at(s, freqs), omp::dft_at(s, freqs));
}

TEST_P(ThreadCounts, EvaluateMatchesSerial) {
  const auto xs = random_reals(500, 6);
  auto f = [](double x) { return std::sin(x) * std::exp(-x * x); };
  EXPECT_EQ(serial::evaluate(xs, f), omp::evaluate(xs, f));
}

INSTANTIATE_TEST_SUITE_P(Kernels, ThreadCounts, ::testing::Values(1, 2, 4, 7));

TEST(Dft, PureToneHasSingleCoefficient) {
  const std::size_t n = 64;
  std::vector<cplx> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = std::polar(1.0, 2.0 * M_PI * 5.0 * j / n);
  const std::vector<int> freqs{-5, 0, 4, 5, 6, 69};
  const auto c = serial::dft_at(s, freqs);
  EXPECT_NEAR(std::abs(c[0]), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c[1]), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c[2]), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c[3] - cplx(1.0, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c[5] - cplx(1.0, 0.0)), 0.0, 1e-14);  // aliases to 5
}

TEST(ApplyPhase, UnitModulus) {
  std::vector<cplx> ones(100, cplx(1.0, 0.0));
  const auto phase = random_reals(100, 9);
  serial::apply_phase(ones, phase, 2.5);
  for (std::size_t j = 0; j < ones.size(); ++j) {
    EXPECT_NEAR(std::abs(ones[j]), 1.0, 1e-15);
    EXPECT_NEAR(std::arg(ones[j]), std::remainder(-2.5 * phase[j], 2.0 * M_PI), 1e-12);
  }
}
