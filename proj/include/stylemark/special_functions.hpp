#pragma once

// Distribution functions needed by the ANOVA and Tukey tests. Header-only and
// templated on the floating-point type; double is the instantiation in use.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>

namespace stylemark::stats {

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
template <std::floating_point T>
T beta_continued_fraction(T x, T a, T b) {
  constexpr int kMaxIter = 500;
  constexpr T kEps = std::numeric_limits<T>::epsilon();
  constexpr T kTiny = std::numeric_limits<T>::min() / kEps;
  const T qab = a + b;
  const T qap = a + 1;
  const T qam = a - 1;
  T c = 1;
  T d = 1 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1 / d;
  T h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const T m2 = 2 * m;
    T aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const T del = d * c;
    h *= del;
    if (std::abs(del - 1) <= kEps) return h;
  }
  return h;
}

// 16-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
inline constexpr std::array<double, 8> kGaussNodes = {
    0.0950125098376374401853193, 0.2816035507792589132304605, 0.4580167776572273863424194,
    0.6178762444026437484466718, 0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr std::array<double, 8> kGaussWeights = {
    0.1894506104550684962853967, 0.1826034150449235888667637, 0.1691565193950025381893121,
    0.1495959888165767320815017, 0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

// Composite 16-point Gauss-Legendre quadrature of f over [lo, hi].
template <std::floating_point T, typename F>
T integrate(F&& f, T lo, T hi, int panels) {
  const T width = (hi - lo) / panels;
  T total = 0;
  for (int p = 0; p < panels; ++p) {
    const T mid = lo + (p + T(0.5)) * width;
    const T half = width / 2;
    T sum = 0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
      const T dx = half * static_cast<T>(kGaussNodes[i]);
      sum += static_cast<T>(kGaussWeights[i]) * (f(mid - dx) + f(mid + dx));
    }
    total += sum * half;
  }
  return total;
}

template <std::floating_point T>
T normal_cdf(T z) {
  return std::erfc(-z / std::sqrt(T(2))) / 2;
}

template <std::floating_point T>
T normal_pdf(T z) {
  constexpr T kInvSqrt2Pi = T(0.398942280401432677939946059934);
  return kInvSqrt2Pi * std::exp(-z * z / 2);
}

// Probability that the range of k standard normals is below w:
// k * ∫ φ(z) [Φ(z) − Φ(z − w)]^(k−1) dz.
template <std::floating_point T>
T normal_range_cdf(T w, int k) {
  if (w <= 0) return 0;
  const auto integrand = [&](T z) {
    const T inner = normal_cdf(z) - normal_cdf(z - w);
    return inner <= 0 ? T(0) : normal_pdf(z) * std::pow(inner, T(k - 1));
  };
  const T value = k * integrate<T>(integrand, T(-8.5), T(8.5), 12);
  return value > 1 ? T(1) : value;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
template <std::floating_point T>
T regularized_beta(T x, T a, T b) {
  if (!(a > 0) || !(b > 0)) throw std::domain_error("regularized_beta: a and b must be positive");
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const T log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const T front = std::exp(log_front);
  if (x < (a + 1) / (a + b + 2)) return front * detail::beta_continued_fraction(x, a, b) / a;
  return 1 - front * detail::beta_continued_fraction(1 - x, b, a) / b;
}

/// CDF of the F distribution with (d1, d2) degrees of freedom.
template <std::floating_point T>
T f_cdf(T x, T d1, T d2) {
  if (!(d1 > 0) || !(d2 > 0)) throw std::domain_error("f_cdf: degrees of freedom must be positive");
  if (std::isnan(x)) return x;
  if (x <= 0) return 0;
  if (std::isinf(x)) return 1;
  return regularized_beta(d1 * x / (d1 * x + d2), d1 / 2, d2 / 2);
}

/// CDF of the studentized range for k groups and df error degrees of freedom,
/// by Gauss-Legendre evaluation of the double integral over the scale factor
/// s = sqrt(chi2_df / df) and the normal range. df = +inf gives the normal range.
template <std::floating_point T>
T studentized_range_cdf(T q, int k, T df) {
  if (k < 2) throw std::domain_error("studentized_range_cdf: k must be at least 2");
  if (!(df > 0)) throw std::domain_error("studentized_range_cdf: df must be positive");
  if (std::isnan(q)) return q;
  if (q <= 0) return 0;
  if (std::isinf(q)) return 1;
  if (std::isinf(df) || df > 25000) return detail::normal_range_cdf(q, k);

  const T half = df / 2;
  const T log_norm = half * std::log(df) - std::lgamma(half) - (half - 1) * std::log(T(2));
  const auto density = [&](T s) {
    if (s <= 0) return T(0);
    return std::exp(log_norm + (df - 1) * std::log(s) - df * s * s / 2);
  };
  // s^2 * df is chi-square(df); integrate well past its upper tail.
  const T spread = 12 * std::sqrt(2 * df) + 40;
  const T hi = std::sqrt((df + spread) / df);
  const T lo = df > 200 ? std::sqrt(std::max(T(0), (df - spread) / df)) : T(0);
  const T value = detail::integrate<T>([&](T s) { return density(s) * detail::normal_range_cdf(q * s, k); }, lo, hi, 16);
  if (value < 0) return 0;
  return value > 1 ? T(1) : value;
}

}  // namespace stylemark::stats
