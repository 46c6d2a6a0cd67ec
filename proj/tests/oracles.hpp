#pragma once

// Brute-force references used to freeze expected values in the tests.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "aamkit/metric.hpp"

namespace oracle {

using aamkit::Point;

/// Every point of the lattice lo + h * k inside [lo, hi] (hi included).
inline std::vector<Point> lattice(const Point& lo, const Point& hi, double h) {
  std::vector<Point> out;
  std::vector<std::size_t> counts;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    counts.push_back(static_cast<std::size_t>(std::floor((hi[j] - lo[j]) / h + 1e-9)) + 1);
  }
  std::vector<std::size_t> k(lo.size(), 0);
  while (true) {
    Point x(lo.size());
    for (std::size_t j = 0; j < lo.size(); ++j) {
      x[j] = std::min(hi[j], lo[j] + h * static_cast<double>(k[j]));
    }
    out.push_back(std::move(x));
    std::size_t j = 0;
    while (j < k.size() && ++k[j] == counts[j]) k[j++] = 0;
    if (j == k.size()) break;
  }
  return out;
}

/// Points of {x >= floor, sum x = 1} in dim coordinates whose first dim-1
/// entries lie on the h-lattice.
inline std::vector<Point> simplex_grid(std::size_t dim, double floor, double h) {
  std::vector<Point> out;
  if (dim == 1) return {Point{1.0}};
  const std::size_t steps = static_cast<std::size_t>(std::floor((1.0 - dim * floor) / h + 1e-9));
  std::vector<std::size_t> k(dim - 1, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t used) {
    if (j == dim - 1) {
      Point x(dim);
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < dim; ++i) {
        x[i] = floor + h * static_cast<double>(k[i]);
        s += x[i];
      }
      x[dim - 1] = 1.0 - s;
      if (x[dim - 1] >= floor - 1e-12) out.push_back(x);
      return;
    }
    for (std::size_t v = 0; used + v <= steps; ++v) {
      k[j] = v;
      rec(j + 1, used + v);
    }
  };
  rec(0, 0);
  return out;
}

/// Barycentric lattice of the floored simplex: x = floor + room * k / N with
/// N = ceil(room / h), so every face (floors included) carries grid points
/// and the spacing never exceeds h.
inline std::vector<Point> face_simplex_grid(std::size_t dim, double floor, double h) {
  const double room = 1.0 - static_cast<double>(dim) * floor;
  const auto n = static_cast<std::size_t>(std::ceil(room / h - 1e-9));
  std::vector<Point> out;
  std::vector<std::size_t> k(dim, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t left) {
    if (j + 1 == dim) {
      k[j] = left;
      Point x(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        x[i] = floor + room * static_cast<double>(k[i]) / static_cast<double>(n);
      }
      out.push_back(std::move(x));
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      k[j] = v;
      rec(j + 1, left - v);
    }
  };
  rec(0, n);
  return out;
}

/// Lattice of [lo, hi] with both endpoints on every axis and spacing <= h.
inline std::vector<Point> closed_lattice(const Point& lo, const Point& hi, double h) {
  std::vector<std::size_t> counts;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    counts.push_back(static_cast<std::size_t>(std::ceil((hi[j] - lo[j]) / h - 1e-9)));
  }
  std::vector<Point> out;
  std::vector<std::size_t> k(lo.size(), 0);
  while (true) {
    Point x(lo.size());
    for (std::size_t j = 0; j < lo.size(); ++j) {
      x[j] = counts[j] == 0 ? lo[j]
                            : lo[j] + (hi[j] - lo[j]) * static_cast<double>(k[j]) /
                                          static_cast<double>(counts[j]);
    }
    out.push_back(std::move(x));
    std::size_t j = 0;
    while (j < k.size() && ++k[j] == counts[j] + 1) k[j++] = 0;
    if (j == k.size()) break;
  }
  return out;
}

/// Polar grid of a closed disc: radial and arc spacing <= h, boundary included.
inline std::vector<Point> disc_grid(const Point& c, double r, double h) {
  const double pi = std::acos(-1.0);
  const auto nr = static_cast<std::size_t>(std::ceil(r / h));
  std::vector<Point> out{c};
  for (std::size_t a = 1; a <= nr; ++a) {
    const double rho = r * static_cast<double>(a) / static_cast<double>(nr);
    const auto nt = static_cast<std::size_t>(std::ceil(2.0 * pi * rho / h));
    for (std::size_t b = 0; b < nt; ++b) {
      const double t = 2.0 * pi * static_cast<double>(b) / static_cast<double>(nt);
      out.push_back({c[0] + rho * std::cos(t), c[1] + rho * std::sin(t)});
    }
  }
  return out;
}

template <class F>
Point argmin(const std::vector<Point>& candidates, F&& f, double* best_value = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  Point arg;
  for (const auto& x : candidates) {
    const double v = f(x);
    if (v < best) {
      best = v;
      arg = x;
    }
  }
  if (best_value != nullptr) *best_value = best;
  return arg;
}

inline double max_abs_diff(const Point& a, const Point& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace oracle
