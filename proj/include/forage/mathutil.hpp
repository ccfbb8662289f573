#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace forage {

inline constexpr double kProbEps = 1e-300;

/// Digamma via upward recurrence into the asymptotic series region.
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("digamma: x must be positive");
  double r = 0.0;
  while (x < 6.0) {
    r -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // psi(x) ~ ln x - 1/2x - 1/12x^2 + 1/120x^4 - 1/252x^6 + 1/240x^8
  return r + std::log(x) - 0.5 * inv +
         inv2 * (-1.0 / 12.0 +
                 inv2 * (1.0 / 120.0 + inv2 * (-1.0 / 252.0 + inv2 / 240.0)));
}

inline double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

/// log softmax(v), written into out (may alias v's storage).
inline void log_softmax(std::span<const double> v, std::span<double> out) {
  const double lse = log_sum_exp(v);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lse;
}

inline std::vector<double> log_softmax(std::span<const double> v) {
  std::vector<double> out(v.size());
  log_softmax(v, out);
  return out;
}

/// softmax(v / temperature), written into out.
inline void softmax(std::span<const double> v, double temperature,
                    std::span<double> out) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp((v[i] - m) / temperature);
    s += out[i];
  }
  for (std::size_t i = 0; i < v.size(); ++i) out[i] /= s;
}

/// KL divergence between two Dirichlet distributions given their
/// concentration parameters: KL(Dir(after) || Dir(before)).
inline double dirichlet_kl(std::span<const double> after,
                           std::span<const double> before) {
  if (after.size() != before.size())
    throw std::invalid_argument("dirichlet_kl: size mismatch");
  double a0 = 0.0, b0 = 0.0;
  for (double a : after) a0 += a;
  for (double b : before) b0 += b;
  double kl = std::lgamma(a0) - std::lgamma(b0);
  const double psi_a0 = digamma(a0);
  for (std::size_t i = 0; i < after.size(); ++i) {
    kl += std::lgamma(before[i]) - std::lgamma(after[i]);
    kl += (after[i] - before[i]) * (digamma(after[i]) - psi_a0);
  }
  return kl;
}

// --- regularized incomplete beta, for the F-distribution tail ---

namespace detail {

inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double eps = 3e-14;
  constexpr double fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * detail::betacf(a, b, x) / a;
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

/// Right-tail p-value of the F distribution with (d1, d2) dof.
inline double f_tail_p(double f, double d1, double d2) {
  if (!(f >= 0.0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

}  // namespace forage
