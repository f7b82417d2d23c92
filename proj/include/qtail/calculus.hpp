#pragma once

// Numerical differentiation helpers shared by the analytic-continuation
// derivative path and by the finite-difference oracles.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qtail/types.hpp"

namespace qtail {

/// Taylor derivatives f^(n)(z0), n = 0..nmax, of a function analytic on the
/// closed disc |z - z0| <= radius. Trapezoidal rule on the circle; the error
/// decays like (radius / distance to nearest singularity)^samples.
template <class Fn>
std::vector<cplx> contour_derivatives(Fn&& f, cplx z0, double radius, int nmax,
                                      int samples = 64) {
  std::vector<cplx> values(samples);
  for (int j = 0; j < samples; ++j) {
    const double theta = 2.0 * pi * j / samples;
    values[j] = f(z0 + std::polar(radius, theta));
  }
  std::vector<cplx> out(nmax + 1);
  double factorial = 1.0;
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) factorial *= n;
    cplx c{0.0, 0.0};
    for (int j = 0; j < samples; ++j)
      c += values[j] * std::polar(1.0, -2.0 * pi * n * j / samples);
    out[n] = c / static_cast<double>(samples) * factorial / std::pow(radius, n);
  }
  return out;
}

/// n-th derivative at 0 of the polynomial interpolating f at the one-sided
/// nodes sigma*h*j, j = 1..n+extra. Truncation error is O(h^extra).
template <class Scalar, class Fn>
Scalar one_sided_lagrange_derivative(Fn&& f, int n, int sigma, double h, int extra) {
  const int npts = n + extra;
  Eigen::MatrixXd vander(npts, npts);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs(npts);
  for (int j = 0; j < npts; ++j) {
    const double u = j + 1.0;
    double p = 1.0;
    for (int i = 0; i < npts; ++i) {
      vander(j, i) = p;
      p *= u;
    }
    rhs(j) = f(sigma * h * u);
  }
  // Coefficients in the scaled variable u = s / (sigma h).
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coef =
      vander.cast<Scalar>().fullPivLu().solve(rhs);
  double factorial = 1.0;
  for (int i = 2; i <= n; ++i) factorial *= i;
  return coef(n) * factorial / std::pow(sigma * h, n);
}

/// One-sided n-th derivative at 0 with two levels of Richardson
/// extrapolation over the steps h, h/2, h/4.
template <class Scalar, class Fn>
Scalar one_sided_derivative(Fn&& f, int n, int sigma, double h = 4e-3, int extra = 4) {
  const Scalar d0 = one_sided_lagrange_derivative<Scalar>(f, n, sigma, h, extra);
  const Scalar d1 = one_sided_lagrange_derivative<Scalar>(f, n, sigma, h / 2, extra);
  const Scalar d2 = one_sided_lagrange_derivative<Scalar>(f, n, sigma, h / 4, extra);
  const double r1 = std::pow(2.0, extra);
  const double r2 = std::pow(2.0, extra + 1);
  const Scalar e01 = (r1 * d1 - d0) / (r1 - 1.0);
  const Scalar e12 = (r1 * d2 - d1) / (r1 - 1.0);
  return (r2 * e12 - e01) / (r2 - 1.0);
}

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace qtail
