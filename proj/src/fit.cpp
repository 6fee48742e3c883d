#include "kdsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "kdsim/kernels.hpp"
#include "kdsim/specfun.hpp"

namespace kdsim {

namespace {

using Objective = std::function<double(double)>;

void validate_options(const FitOptions& o) {
  if (!std::isfinite(o.r_min) || o.r_min < 0.0) throw DomainError("r_min must be finite and >= 0");
  if (!std::isfinite(o.r_max) || !(o.r_max > o.r_min)) throw DomainError("r_max must exceed r_min");
  if (!(o.delta_chi2 > 0.0)) throw DomainError("delta_chi2 must be > 0");
  if (o.scan_points < kMinScanPoints) {
    std::ostringstream msg;
    msg << "scan_points must be >= " << kMinScanPoints;
    throw DomainError(msg.str());
  }
  if (!(o.tolerance > 0.0)) throw DomainError("tolerance must be > 0");
}

// Crossing of f(r) = level between a point above (r_out) and below (r_in).
double bisect_crossing(const Objective& f, double level, double r_out, double r_in) {
  for (int it = 0; it < 200 && std::abs(r_in - r_out) > 1e-13; ++it) {
    const double mid = 0.5 * (r_in + r_out);
    if (f(mid) <= level) {
      r_in = mid;
    } else {
      r_out = mid;
    }
  }
  return r_in;
}

FitResult fit_objective(const Objective& f, int n_records, const FitOptions& options) {
  validate_options(options);
  FitResult res;
  res.delta_chi2 = options.delta_chi2;
  res.dof = std::max(0, n_records - 1);

  const int n = options.scan_points;
  const double step = (options.r_max - options.r_min) / (n - 1);
  std::vector<double> rs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rs[static_cast<std::size_t>(i)] = options.r_min + i * step;
  rs.back() = options.r_max;
  const std::vector<double> cs = kernels::omp::evaluate(rs, f);
  res.scan.reserve(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) res.scan.push_back({rs[i], cs[i]});

  // Local minima of the scan, each refined inside its neighbouring bracket.
  struct Candidate {
    double r;
    double chi2;
    std::size_t index;
  };
  std::vector<Candidate> minima;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const bool left_ok = i == 0 || cs[i] < cs[i - 1];
    const bool right_ok = i + 1 == cs.size() || cs[i] <= cs[i + 1];
    if (!(left_ok && right_ok)) continue;
    const double a = rs[i == 0 ? 0 : i - 1];
    const double b = rs[std::min(i + 1, cs.size() - 1)];
    double r = golden_section_minimize(f, a, b, options.tolerance);
    double c = f(r);
    if (!(c <= cs[i])) {
      r = rs[i];
      c = cs[i];
    }
    minima.push_back({r, c, i});
  }

  const auto best = std::min_element(minima.begin(), minima.end(),
                                     [](const Candidate& x, const Candidate& y) { return x.chi2 < y.chi2; });
  res.r_eff_hat = best->r;
  res.chi2_min = best->chi2;
  for (const auto& m : minima) res.local_minima.push_back(m.r);
  res.multimodal = minima.size() > 1;
  if (res.multimodal) {
    std::ostringstream msg;
    msg << minima.size() << " local minima in scan; global one selected";
    res.notes.push_back(msg.str());
  }
  if (best->index == 0 || best->index + 1 == cs.size()) {
    res.unbounded = true;
    res.notes.push_back("minimum lies on a scan bound");
  }

  // Confidence interval: outermost crossings of chi2_min + delta_chi2.
  const double level = res.chi2_min + options.delta_chi2;
  std::size_t lo = cs.size();
  std::size_t hi = cs.size();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs[i] <= level) {
      if (lo == cs.size()) lo = i;
      hi = i;
    }
  }
  // Nearest scan points bracketing the refined minimum.
  const auto upper = std::upper_bound(rs.begin(), rs.end(), res.r_eff_hat);
  const std::size_t right_of_hat = static_cast<std::size_t>(upper - rs.begin());

  if (lo != cs.size() && rs[lo] <= res.r_eff_hat) {
    res.r_lo = lo == 0 ? rs[0] : bisect_crossing(f, level, rs[lo - 1], rs[lo]);
  } else {
    res.r_lo = right_of_hat == 0 ? rs[0]
                                 : bisect_crossing(f, level, rs[right_of_hat - 1], res.r_eff_hat);
  }
  if (hi != cs.size() && rs[hi] >= res.r_eff_hat) {
    res.r_hi = hi + 1 == cs.size() ? rs.back() : bisect_crossing(f, level, rs[hi + 1], rs[hi]);
  } else {
    res.r_hi = right_of_hat >= rs.size() ? rs.back()
                                         : bisect_crossing(f, level, rs[right_of_hat], res.r_eff_hat);
  }
  // A scan point still below the level at a bound means the interval is open there.
  if ((lo == 0) || (hi + 1 == cs.size() && hi != cs.size())) {
    res.unbounded = true;
    res.notes.push_back("confidence interval reaches a scan bound");
  }
  res.r_lo = std::min(res.r_lo, res.r_eff_hat);
  res.r_hi = std::max(res.r_hi, res.r_eff_hat);

  if (res.dof > 0) {
    const double dof = res.dof;
    if (res.chi2_min > dof + 3.0 * std::sqrt(2.0 * dof)) {
      res.misfit = true;
      std::ostringstream msg;
      msg << "model misfit: chi2_min/dof = " << res.chi2_min / dof;
      res.notes.push_back(msg.str());
    }
  }
  return res;
}

}  // namespace

void ObservedPattern::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) throw DomainError("observed alpha must be finite and >= 0");
  std::set<int> orders;
  for (const auto& r : records) {
    if (!(r.sigma > 0.0) || !std::isfinite(r.sigma)) throw DomainError("observed sigma must be > 0");
    if (!(r.value >= 0.0 && r.value <= 1.0)) throw DomainError("observed probability must lie in [0, 1]");
    orders.insert(r.order);
  }
  if (orders.size() < 3) throw DomainError("observed pattern needs at least 3 distinct orders");
}

double chi_square(const ObservedPattern& obs, double r_eff) {
  if (!(r_eff >= 0.0)) throw DomainError("r_eff must be >= 0");
  int reach = 0;
  for (const auto& r : obs.records) reach = std::max(reach, std::abs(r.order));
  const BesselRow row = bessel_row(reach, obs.alpha * r_eff);
  double chi2 = 0.0;
  for (const auto& r : obs.records) {
    const double j = row[std::abs(r.order)];
    const double resid = (r.value - j * j) / r.sigma;
    chi2 += resid * resid;
  }
  return chi2;
}

double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = f(mid);
  if (fm <= fc && fm <= fd) return mid;
  return fc < fd ? c : d;
}

FitResult fit_effective_amplitude(const ObservedPattern& obs, const FitOptions& options) {
  obs.validate();
  return fit_objective([&obs](double r) { return chi_square(obs, r); },
                       static_cast<int>(obs.records.size()), options);
}

FitResult joint_fit(const std::vector<ObservedPattern>& datasets, const FitOptions& options) {
  if (datasets.empty()) throw DomainError("joint_fit needs at least one dataset");
  int n_records = 0;
  for (const auto& d : datasets) {
    d.validate();
    n_records += static_cast<int>(d.records.size());
  }
  return fit_objective(
      [&datasets](double r) {
        double total = 0.0;
        for (const auto& d : datasets) total += chi_square(d, r);
        return total;
      },
      n_records, options);
}

bool MomentRegion::contains(double d_tilde, double q_tilde) const {
  if (!(d_tilde >= 0.0 && d_tilde < 1.0 && q_tilde >= 0.0 && q_tilde < 1.0)) return false;
  const double r = std::hypot(1.0 - 2.0 * q_tilde, 2.0 * d_tilde);
  return r >= r_lo * (1.0 - kBandSlack) && r <= r_hi * (1.0 + kBandSlack);
}

MomentRegion moment_region(const FitResult& fit, int n_samples) {
  if (!(fit.r_lo >= 0.0) || !(fit.r_hi >= fit.r_lo) || !std::isfinite(fit.r_hi)) {
    throw DomainError("moment_region: invalid confidence interval");
  }
  if (n_samples < 2) throw DomainError("moment_region: n_samples must be >= 2");

  MomentRegion region;
  region.r_lo = fit.r_lo;
  region.r_hi = fit.r_hi;

  // In (u, v) = (2d, 1 - 2q) the band is an annulus about the origin; the
  // validity square maps to 0 <= u < 2, -1 < v <= 1.
  auto arc = [&](double radius, std::vector<std::pair<double, double>>& out) {
    for (int i = 0; i < n_samples; ++i) {
      const double theta = -0.5 * std::numbers::pi + std::numbers::pi * i / (n_samples - 1);
      const bool pole = i == 0 || i == n_samples - 1;
      const double u = pole ? 0.0 : std::max(0.0, radius * std::cos(theta));
      const double v = radius * std::sin(theta);
      const double d = 0.5 * u;
      const double q = 0.5 * (1.0 - v);
      if (region.contains(d, q)) out.emplace_back(d, q);  // re-evaluated as emitted
    }
  };
  arc(region.r_lo, region.inner);
  arc(region.r_hi, region.outer);

  const double sup_radius = std::sqrt(5.0);  // corner d -> 1, q -> 1 (not attained)
  if (region.r_lo >= sup_radius) {
    region.empty = true;
    std::ostringstream msg;
    msg << "band r_eff in [" << region.r_lo << ", " << region.r_hi
        << "] misses the validity square 0 <= d,q < 1 (r_eff < sqrt(5) there)";
    region.notes.push_back(msg.str());
  } else if (region.inner.empty() && region.outer.empty()) {
    region.notes.push_back("band meets the validity square only below the sampling resolution");
  }
  return region;
}

ObservedPattern synthesize_gaussian(double alpha, double r_eff, const std::vector<int>& orders,
                                    const GaussianNoise& noise, std::uint64_t seed) {
  if (!(noise.relative_sigma >= 0.0) || !(noise.sigma_floor > 0.0)) {
    throw DomainError("noise sigmas must be non-negative with a positive floor");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  int reach = 0;
  for (int p : orders) reach = std::max(reach, std::abs(p));
  const BesselRow row = bessel_row(reach, alpha * r_eff);

  ObservedPattern obs;
  obs.alpha = alpha;
  for (int p : orders) {
    const double j = row[std::abs(p)];
    const double truth = j * j;
    const double sigma = std::max(noise.relative_sigma * truth, noise.sigma_floor);
    double value = truth;
    if (noise.relative_sigma > 0.0) value += sigma * normal(rng);
    obs.records.push_back({p, std::clamp(value, 0.0, 1.0), sigma});
  }
  return obs;
}

ObservedPattern synthesize_counts(double alpha, double r_eff, const std::vector<int>& orders,
                                  std::int64_t shots, std::uint64_t seed) {
  if (shots <= 0) throw DomainError("shots must be > 0");
  std::mt19937_64 rng(seed);
  int reach = 0;
  for (int p : orders) reach = std::max(reach, std::abs(p));
  const BesselRow row = bessel_row(reach, alpha * r_eff);

  // Sequential conditional binomials realise one multinomial draw.
  ObservedPattern obs;
  obs.alpha = alpha;
  std::int64_t remaining = shots;
  double remaining_p = 1.0;
  const double n = static_cast<double>(shots);
  for (int p : orders) {
    const double j = row[std::abs(p)];
    const double prob = j * j;
    std::int64_t count = 0;
    if (remaining > 0 && remaining_p > 0.0) {
      std::binomial_distribution<std::int64_t> binom(remaining, std::clamp(prob / remaining_p, 0.0, 1.0));
      count = binom(rng);
    }
    remaining -= count;
    remaining_p -= prob;
    const double value = static_cast<double>(count) / n;
    const double sigma = std::max({std::sqrt(value * (1.0 - value) / n), 1.0 / n, 1e-4});
    obs.records.push_back({p, value, sigma});
  }
  return obs;
}

}  // namespace kdsim
