#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace iqdesign::detail {

// Deterministic mixer for seed schedules (splitmix64 step).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1) from a counter; used for the fixed restart schedule.
inline double perturbation(std::uint64_t counter) {
  return 2.0 * (mix64(counter) >> 11) * 0x1.0p-53 - 1.0;
}

// Golden-section maximization on [lo, hi]; returns (argmax, max).
inline std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                            double lo, double hi,
                                            double xtol = 1e-12, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > xtol * std::max(1.0, std::abs(a) + std::abs(b)); ++i) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a); f1 = f(x1);
    }
  }
  double xb = 0.5 * (a + b);
  double fb = f(xb);
  if (f1 > fb) { xb = x1; fb = f1; }
  if (f2 > fb) { xb = x2; fb = f2; }
  const double fa = f(lo), fhi = f(hi);
  if (fa > fb) { xb = lo; fb = fa; }
  if (fhi > fb) { xb = hi; fb = fhi; }
  return {xb, fb};
}

// Nelder-Mead minimization with per-coordinate initial steps. Deterministic.
inline std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const std::vector<double>& step,
    int max_iter = 2000, double ftol = 1e-14) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> v2;
    for (std::size_t i : idx) { s2.push_back(simplex[i]); v2.push_back(values[i]); }
    simplex.swap(s2);
    values.swap(v2);
  };
  order();

  for (int iter = 0; iter < max_iter; ++iter) {
    if (std::abs(values[n] - values[0]) <=
        ftol * (std::abs(values[0]) + std::abs(values[n]) + 1e-300))
      break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;
    auto affine = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j)
        p[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
      return p;
    };
    auto reflected = affine(-1.0);
    double fr = f(reflected);
    if (fr < values[0]) {
      auto expanded = affine(-2.0);
      double fe = f(expanded);
      if (fe < fr) { simplex[n] = expanded; values[n] = fe; }
      else { simplex[n] = reflected; values[n] = fr; }
    } else if (fr < values[n - 1]) {
      simplex[n] = reflected; values[n] = fr;
    } else {
      auto contracted = affine(fr < values[n] ? -0.5 : 0.5);
      double fc = f(contracted);
      if (fc < std::min(fr, values[n])) {
        simplex[n] = contracted; values[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          values[i] = f(simplex[i]);
        }
      }
    }
    order();
  }
  return {simplex[0], values[0]};
}

}  // namespace iqdesign::detail
