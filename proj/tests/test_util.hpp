#pragma once

// Shared oracle helpers for the test suites.  Everything here is computed
// independently of the library internals so expected values never come from
// the code under test.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace testutil {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_var(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// All-pairs shortest paths on a weighted undirected graph.
inline std::vector<std::vector<double>> floyd_warshall(
    int n, const std::vector<std::pair<std::pair<int, int>, double>>& edges) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& [e, w] : edges) {
    d[e.first][e.second] = std::min(d[e.first][e.second], w);
    d[e.second][e.first] = std::min(d[e.second][e.first], w);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
      }
    }
  }
  return d;
}

// Upper-tail probability of a chi-square with k degrees of freedom via the
// Wilson-Hilferty normal approximation; adequate for the dispersion tests,
// which only compare against loose significance levels.
inline double chi2_upper_tail(double x, double k) {
  const double z = (std::cbrt(x / k) - (1.0 - 2.0 / (9.0 * k))) / std::sqrt(2.0 / (9.0 * k));
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// log(sum exp(v)) computed stably.
inline double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Poisson upper tail P(X > k) for mean mu, by direct summation of the head.
inline double poisson_upper_tail(double mu, long long k) {
  if (k < 0) return 1.0;
  double log_term = -mu;  // log P(X = 0)
  double head = std::exp(log_term);
  for (long long j = 1; j <= k; ++j) {
    log_term += std::log(mu) - std::log(static_cast<double>(j));
    head += std::exp(log_term);
  }
  return std::max(0.0, 1.0 - head);
}

}  // namespace testutil
