#include "crossprob/special.hpp"

#include <array>
#include <cfloat>
#include <cmath>
#include <limits>

namespace crossprob {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

const std::array<double, 16>& stirling_table() {
  static const std::array<double, 16> table = [] {
    std::array<double, 16> t{};
    const long double half_log_2pi = 0.918938533204672741780329736405617639861L;
    t[0] = 0.0;
    for (int k = 1; k < 16; ++k) {
      const long double kk = k;
      t[k] = static_cast<double>(std::lgamma(kk + 1.0L) - (kk + 0.5L) * std::log(kk) + kk -
                                 half_log_2pi);
    }
    return t;
  }();
  return table;
}

bool is_integral(double v) { return v == std::floor(v) && v < 9.0e15; }

// log( x^a (1-x)^b / B(a, b) ), the common factor of the incomplete beta
// continued fraction. Integer parameters go through the binomial pmf, which
// avoids the cancellation of three large log-gamma terms.
double log_beta_prefactor(double x, double a, double b) {
  if (is_integral(a) && is_integral(b)) {
    const auto ia = static_cast<std::int64_t>(a);
    const auto ib = static_cast<std::int64_t>(b);
    // x^a (1-x)^b / B(a,b) = a (1-x) P(Bin(a+b-1, x) = a)
    return std::log(a) + std::log1p(-x) + log_binomial_pmf(ia, ia + ib - 1, x);
  }
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
         b * std::log1p(-x);
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 100000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Returns the lower (lower_tail == true) or upper regularized tail.
double incomplete_beta_tail(double x, double a, double b, bool lower_tail) {
  if (x <= 0.0) return lower_tail ? 0.0 : 1.0;
  if (x >= 1.0) return lower_tail ? 1.0 : 0.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double direct = std::exp(log_beta_prefactor(x, a, b)) * beta_continued_fraction(x, a, b) / a;
    return lower_tail ? direct : 1.0 - direct;
  }
  const double mirrored =
      std::exp(log_beta_prefactor(1.0 - x, b, a)) * beta_continued_fraction(1.0 - x, b, a) / b;
  return lower_tail ? 1.0 - mirrored : mirrored;
}

}  // namespace

double stirling_error(std::int64_t k) {
  if (k < 16) return stirling_table()[static_cast<std::size_t>(k < 0 ? 0 : k)];
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  const double kk = static_cast<double>(k);
  const double k2 = kk * kk;
  return (s0 - (s1 - (s2 - (s3 - s4 / k2) / k2) / k2) / k2) / kk;
}

double deviance_term(double x, double m) {
  if (std::fabs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    if (std::fabs(s) < DBL_MIN) return s;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

double log_poisson_pmf(std::int64_t k, double lambda) {
  if (k < 0) return kNegInf;
  if (lambda == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (k == 0) return -lambda;
  const double kk = static_cast<double>(k);
  return -stirling_error(k) - deviance_term(kk, lambda) - 0.5 * (kLog2Pi + std::log(kk));
}

double log_binomial_pmf(std::int64_t k, std::int64_t trials, double p) {
  if (k < 0 || k > trials) return kNegInf;
  if (trials == 0) return 0.0;
  const double q = 1.0 - p;
  if (p <= 0.0) return k == 0 ? 0.0 : kNegInf;
  if (q <= 0.0) return k == trials ? 0.0 : kNegInf;
  const double n = static_cast<double>(trials);
  if (k == 0) return p < 0.1 ? -deviance_term(n, n * q) - n * p : n * std::log(q);
  if (k == trials) return q < 0.1 ? -deviance_term(n, n * p) - n * q : n * std::log(p);
  const double x = static_cast<double>(k);
  const double lc = stirling_error(trials) - stirling_error(k) - stirling_error(trials - k) -
                    deviance_term(x, n * p) - deviance_term(n - x, n * q);
  const double lf = kLog2Pi + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

double regularized_incomplete_beta(double x, double a, double b) {
  return incomplete_beta_tail(x, a, b, true);
}

double regularized_incomplete_beta_complement(double x, double a, double b) {
  return incomplete_beta_tail(x, a, b, false);
}

double beta_quantile(double p, double a, double b) {
  if (!(p > 0.0)) return 0.0;
  if (!(p < 1.0)) return 1.0;

  constexpr int kMaxIter = 200;
  constexpr double kRelTol = 1e-15;

  // Newton on the log of whichever tail is at most 1/2, inside a bisection
  // bracket; the log keeps the steps sensible far out in the tails.
  const bool lower = p <= 0.5;
  const double log_target = lower ? std::log(p) : std::log1p(-p);
  auto log_tail = [&](double x) {
    const double v = lower ? regularized_incomplete_beta(x, a, b) : regularized_incomplete_beta_complement(x, a, b);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  };

  double lo = 0.0;
  double hi = 1.0;
  double x = a / (a + b);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const double lt = log_tail(x);
    const double g = lt - log_target;
    if (g == 0.0) return x;
    // The lower tail increases in x, the upper tail decreases.
    if ((g < 0.0) == lower) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= kRelTol * hi) break;

    const double log_pdf = log_beta_prefactor(x, a, b) - std::log(x) - std::log1p(-x);
    const double slope = (lower ? 1.0 : -1.0) * std::exp(log_pdf - lt);
    double next = x - g / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      if (lo == 0.0) {
        next = hi * 0.01;
      } else if (hi == 1.0) {
        next = 1.0 - (1.0 - lo) * 0.01;
      } else if (hi > 4.0 * lo) {
        next = std::sqrt(lo * hi);
      } else {
        next = 0.5 * (lo + hi);
      }
    }
    if (std::fabs(next - x) <= kRelTol * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace crossprob
