#pragma once

// Small dense solvers shared by the fitting code. Internal to the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "trapgen/error.hpp"

namespace trapgen::detail {

using Matrix = std::vector<std::vector<double>>;

inline std::vector<double> solve_dense(Matrix A, std::vector<double> y) {
  const std::size_t n = y.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    }
    std::swap(A[col], A[piv]);
    std::swap(y[col], y[piv]);
    if (A[col][col] == 0.0) throw NumericalFailure("solve_dense: singular system");
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      y[r] -= f * y[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = y[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
    x[r] = s / A[r][r];
  }
  return x;
}

/// Least-squares polynomial coefficients c[0..degree] of y(x). The abscissa
/// is rescaled to [-1, 1] internally to keep the normal equations tame.
inline std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  const auto m = static_cast<std::size_t>(degree) + 1;
  if (x.size() < m) throw InvalidProfile("polyfit: fewer points than coefficients");
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw InvalidProfile("polyfit: all abscissae are zero");
  Matrix A(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::vector<double> p(m);
    double t = 1.0;
    for (std::size_t j = 0; j < m; ++j, t *= x[k] / scale) p[j] = t;
    for (std::size_t r = 0; r < m; ++r) {
      b[r] += p[r] * y[k];
      for (std::size_t c = 0; c < m; ++c) A[r][c] += p[r] * p[c];
    }
  }
  auto c = solve_dense(std::move(A), std::move(b));
  for (std::size_t j = 0; j < m; ++j) c[j] /= std::pow(scale, static_cast<double>(j));
  return c;
}

/// Model callback: value at x for parameters p; fills grad (size p.size()).
using ModelFn = std::function<double(double x, const std::vector<double>& p, std::vector<double>& grad)>;

struct LmResult {
  std::vector<double> params;
  double cost = 0.0;
  int iterations = 0;
};

/// Levenberg-Marquardt with a fixed iteration cap; converged when the
/// relative parameter change drops below tol.
inline LmResult levenberg_marquardt(const std::vector<double>& xs, const std::vector<double>& ys,
                                    std::vector<double> p, const ModelFn& model, int max_iter = 500,
                                    double tol = 1e-10) {
  const std::size_t n = p.size();
  std::vector<double> grad(n);
  auto cost_of = [&](const std::vector<double>& q) {
    double c = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double r = model(xs[k], q, grad) - ys[k];
      c += r * r;
    }
    return c;
  };
  double cost = cost_of(p);
  double mu = 1e-3;
  for (int it = 1; it <= max_iter; ++it) {
    Matrix JtJ(n, std::vector<double>(n, 0.0));
    std::vector<double> Jtr(n, 0.0);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double r = model(xs[k], p, grad) - ys[k];
      for (std::size_t a = 0; a < n; ++a) {
        Jtr[a] -= grad[a] * r;
        for (std::size_t b = 0; b < n; ++b) JtJ[a][b] += grad[a] * grad[b];
      }
    }
    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Matrix A = JtJ;
      for (std::size_t a = 0; a < n; ++a) A[a][a] += mu * std::max(JtJ[a][a], 1e-300);
      std::vector<double> step;
      try {
        step = solve_dense(A, Jtr);
      } catch (const NumericalFailure&) {
        mu *= 10.0;
        continue;
      }
      std::vector<double> q(n);
      for (std::size_t a = 0; a < n; ++a) q[a] = p[a] + step[a];
      const double c = cost_of(q);
      if (std::isfinite(c) && c <= cost) {
        double change = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
          change = std::max(change, std::abs(step[a]) / std::max(std::abs(q[a]), 1e-12));
        }
        p = q;
        cost = c;
        mu = std::max(mu * 0.3, 1e-15);
        accepted = true;
        if (change < tol) return {p, cost, it};
      } else {
        mu *= 10.0;
      }
    }
    if (!accepted) return {p, cost, it};  // no downhill step left: at a minimum to rounding
  }
  throw NumericalFailure("levenberg_marquardt: no convergence within " + std::to_string(max_iter) +
                         " iterations");
}

}  // namespace trapgen::detail
