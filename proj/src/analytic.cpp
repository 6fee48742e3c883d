#include "kdsim/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kdsim/kernels.hpp"
#include "kdsim/specfun.hpp"

namespace kdsim {

namespace {

using cplx = std::complex<double>;

void require_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw DomainError("alpha must be finite and >= 0");
  }
}

void require_cutoff(int cutoff) {
  if (cutoff < 0) throw DomainError("order cutoff must be >= 0");
}

// J_n(x) for |n| <= order_max, indexed n + order_max.
std::vector<double> signed_row(int order_max, double x) {
  const BesselRow row = bessel_row(order_max, x);
  std::vector<double> out(2 * static_cast<std::size_t>(order_max) + 1);
  for (int n = 0; n <= order_max; ++n) {
    out[static_cast<std::size_t>(order_max + n)] = row[n];
    out[static_cast<std::size_t>(order_max - n)] = (n % 2 == 0) ? row[n] : -row[n];
  }
  return out;
}

// i^n
cplx i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void finish(DiffractionPattern& p) {
  p.tail_mass = std::max(0.0, 1.0 - p.total());
  if (p.tail_mass > kTailWarning) {
    p.cutoff_warning = true;
    std::ostringstream msg;
    msg << "tail mass " << p.tail_mass << " beyond order cutoff " << p.cutoff;
    p.notes.push_back(msg.str());
  }
}

DiffractionPattern bessel_squared(double argument, int cutoff) {
  DiffractionPattern p;
  p.cutoff = cutoff;
  p.probabilities.assign(2 * static_cast<std::size_t>(cutoff) + 1, 0.0);
  const BesselRow row = bessel_row(cutoff, argument);
  for (int n = 0; n <= cutoff; ++n) {
    const double v = row[n] * row[n];
    p.probabilities[static_cast<std::size_t>(cutoff + n)] = v;
    p.probabilities[static_cast<std::size_t>(cutoff - n)] = v;
  }
  return p;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::string_view to_string(PatternGenerator g) {
  switch (g) {
    case PatternGenerator::pointlike: return "pointlike";
    case PatternGenerator::distribution: return "distribution";
    case PatternGenerator::closed_form: return "closed_form";
    case PatternGenerator::grating_oracle: return "grating_oracle";
    case PatternGenerator::tdse: return "tdse";
  }
  return "unknown";
}

double DiffractionPattern::at(int p) const {
  return has(p) ? probabilities[static_cast<std::size_t>(p + cutoff)] : 0.0;
}

double DiffractionPattern::total() const {
  double s = 0.0;
  for (double v : probabilities) s += v;
  return s;
}

int default_cutoff(double argument) {
  return static_cast<int>(std::ceil(std::abs(argument))) + kCutoffMargin;
}

DiffractionPattern pointlike_pattern(double alpha, int cutoff) {
  require_alpha(alpha);
  require_cutoff(cutoff);
  DiffractionPattern p = bessel_squared(alpha, cutoff);
  p.alpha = alpha;
  p.generator = PatternGenerator::pointlike;
  finish(p);
  return p;
}

DiffractionPattern pointlike_pattern(double alpha) {
  return pointlike_pattern(alpha, default_cutoff(alpha));
}

std::vector<cplx> distribution_amplitudes(double alpha, const MomentSet& moments, int cutoff,
                                          PhaseConvention convention) {
  require_alpha(alpha);
  require_cutoff(cutoff);
  if (moments.max_order() > 2) {
    throw DomainError(
        "distribution_pattern supports moments up to quadrupole; use closed_form_pattern for "
        "higher orders");
  }
  // U t / hbar - const = A cos(phi) + B sin(phi), phi = 2 k_L x.
  const double a_arg = alpha * (1.0 - 2.0 * moments.quadrupole());
  const double b_arg = -2.0 * alpha * moments.dipole();
  const int na = default_cutoff(a_arg);
  const int nb = default_cutoff(b_arg);

  // exp(+i(A cos + B sin)) = sum_n i^n J_n(A) e^{in phi} * sum_m J_m(B) e^{im phi}
  // exp(-i(A cos + B sin)) = sum_n (-i)^n J_n(A) e^{in phi} * sum_m J_m(-B) e^{im phi}
  const bool positive = convention == PhaseConvention::positive;
  const std::vector<double> ja = signed_row(na, a_arg);
  const std::vector<double> jb = signed_row(nb, positive ? b_arg : -b_arg);

  std::vector<cplx> c(2 * static_cast<std::size_t>(cutoff) + 1, 0.0);
  for (int p = -cutoff; p <= cutoff; ++p) {
    cplx acc = 0.0;
    const int n_lo = std::max(-na, p - nb);
    const int n_hi = std::min(na, p + nb);
    for (int n = n_lo; n <= n_hi; ++n) {
      const int m = p - n;
      const cplx phase = positive ? i_pow(n) : i_pow(-n);
      acc += phase * ja[static_cast<std::size_t>(n + na)] * jb[static_cast<std::size_t>(m + nb)];
    }
    c[static_cast<std::size_t>(p + cutoff)] = acc;
  }
  return c;
}

DiffractionPattern distribution_pattern(double alpha, const MomentSet& moments, int cutoff) {
  const auto c = distribution_amplitudes(alpha, moments, cutoff, PhaseConvention::positive);
  DiffractionPattern p;
  p.cutoff = cutoff;
  p.alpha = alpha;
  p.moments = moments;
  p.generator = PatternGenerator::distribution;
  p.probabilities.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) p.probabilities[i] = std::norm(c[i]);
  finish(p);
  return p;
}

DiffractionPattern distribution_pattern(double alpha, const MomentSet& moments) {
  return distribution_pattern(alpha, moments,
                              default_cutoff(alpha * effective_amplitude(moments)));
}

double effective_amplitude(const MomentSet& moments) {
  return build_potential(moments).amplitude();
}

DiffractionPattern closed_form_pattern(double alpha, const MomentSet& moments, int cutoff) {
  require_alpha(alpha);
  require_cutoff(cutoff);
  DiffractionPattern p = bessel_squared(alpha * effective_amplitude(moments), cutoff);
  p.alpha = alpha;
  p.moments = moments;
  p.generator = PatternGenerator::closed_form;
  finish(p);
  return p;
}

DiffractionPattern closed_form_pattern(double alpha, const MomentSet& moments) {
  return closed_form_pattern(alpha, moments,
                             default_cutoff(alpha * effective_amplitude(moments)));
}

DiffractionPattern grating_oracle(const PotentialSpec& spec, double alpha, int grid_size,
                                  int cutoff) {
  require_alpha(alpha);
  require_cutoff(cutoff);
  if (!is_power_of_two(grid_size)) throw DomainError("grating_oracle: grid_size must be a power of two");
  if (grid_size < 4 * cutoff + 16) {
    std::ostringstream msg;
    msg << "grating_oracle: grid_size " << grid_size << " aliases orders up to " << cutoff
        << " (need >= " << 4 * cutoff + 16 << ")";
    throw NumericalFailure(msg.str());
  }

  // One period x in [0, pi) of the potential; phi = 2x spans [0, 2 pi).
  const auto n = static_cast<std::size_t>(grid_size);
  std::vector<cplx> transmission(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    const double phase = alpha * (spec.a_c * std::cos(phi) + spec.a_s * std::sin(phi));
    transmission[j] = cplx(std::cos(phase), std::sin(phase));
  }
  std::vector<int> orders(2 * static_cast<std::size_t>(cutoff) + 1);
  for (int p = -cutoff; p <= cutoff; ++p) orders[static_cast<std::size_t>(p + cutoff)] = p;
  const auto coeff = kernels::omp::dft_at(transmission, orders);

  DiffractionPattern p;
  p.cutoff = cutoff;
  p.alpha = alpha;
  p.generator = PatternGenerator::grating_oracle;
  p.probabilities.resize(coeff.size());
  for (std::size_t i = 0; i < coeff.size(); ++i) p.probabilities[i] = std::norm(coeff[i]);
  finish(p);
  return p;
}

PatternDistance pattern_distance(const DiffractionPattern& a, const DiffractionPattern& b) {
  PatternDistance d;
  const int common = std::min(a.cutoff, b.cutoff);
  double sum = 0.0;
  for (int p = -common; p <= common; ++p) {
    const double diff = std::abs(a.at(p) - b.at(p));
    d.max_abs = std::max(d.max_abs, diff);
    sum += diff;
  }
  d.total_variation = 0.5 * sum;
  return d;
}

}  // namespace kdsim
