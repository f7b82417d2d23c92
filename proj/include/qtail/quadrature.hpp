#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Core>

#include "qtail/types.hpp"

namespace qtail {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

/// Supported orders: 4, 6, 8, 10, 12, 16, 20.
GaussRule gauss_legendre(int order);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (G7/K15) on a finite interval.
template <class Fn>
QuadResult integrate(Fn&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 15) {
  QuadResult r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, max_depth, tol, &r.error);
  return r;
}

/// Complex integrand, real and imaginary parts integrated separately.
template <class Fn>
cplx integrate_complex(Fn&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 15,
                       double* error = nullptr) {
  const auto re = integrate([&](double x) { return std::real(f(x)); }, a, b, tol, max_depth);
  const auto im = integrate([&](double x) { return std::imag(f(x)); }, a, b, tol, max_depth);
  if (error) *error = std::hypot(re.error, im.error);
  return {re.value, im.value};
}

/// Integral over a partition of [a, b] into `panels` equal panels, each
/// integrated by adaptive Gauss-Kronrod. Useful for oscillatory integrands
/// whose period is known.
template <class Fn>
cplx integrate_complex_panels(Fn&& f, double a, double b, int panels, double tol = 1e-13) {
  cplx sum{0.0, 0.0};
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    sum += integrate_complex(f, a + p * h, a + (p + 1) * h, tol, 15);
  return sum;
}

}  // namespace qtail
