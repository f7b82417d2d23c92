#include <doctest.h>

#include <cmath>

#include "qtail/calculus.hpp"
#include "qtail/quadrature.hpp"

using namespace qtail;

TEST_CASE("contour derivatives of exp are all one") {
  const auto d = contour_derivatives([](cplx z) { return std::exp(z); }, 0.0, 0.5, 6);
  for (int n = 0; n <= 6; ++n) CHECK(std::abs(d[n] - 1.0) < 1e-10);
}

TEST_CASE("contour derivatives about a shifted centre") {
  // (1 - z)^{-1} around z0 = 0.2: n! / 0.8^{n+1}
  const auto d = contour_derivatives([](cplx z) { return 1.0 / (1.0 - z); }, 0.2, 0.2, 4);
  for (int n = 0; n <= 4; ++n) {
    const double exact = factorial(n) / std::pow(0.8, n + 1);
    CHECK(std::abs(d[n] - exact) < 1e-10 * exact);
  }
}

TEST_CASE("one-sided derivatives of sin from either side") {
  auto f = [](double x) { return std::sin(x); };
  for (int sigma : {1, -1}) {
    CHECK(one_sided_derivative<double>(f, 0, sigma) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(one_sided_derivative<double>(f, 1, sigma) - 1.0) < 1e-10);
    CHECK(std::abs(one_sided_derivative<double>(f, 2, sigma)) < 1e-7);
    CHECK(std::abs(one_sided_derivative<double>(f, 3, sigma) + 1.0) < 1e-6);
  }
}

TEST_CASE("binomial and factorial") {
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(4, 0) == 1.0);
  CHECK(binomial(4, 4) == 1.0);
  CHECK(factorial(0) == 1.0);
  CHECK(factorial(5) == 120.0);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int order : {4, 6, 8, 10, 12, 16, 20}) {
    const GaussRule g = gauss_legendre(order);
    CHECK(g.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    const int deg = 2 * order - 2;
    const double exact = 2.0 / (deg + 1);
    CHECK((g.weights * g.nodes.pow(deg)).sum() == doctest::Approx(exact).epsilon(1e-13));
  }
  CHECK_THROWS_AS(gauss_legendre(7), Error);
}

TEST_CASE("adaptive quadrature of a Gaussian") {
  const auto r = integrate([](double x) { return std::exp(-x * x); }, -10, 10);
  CHECK(r.value == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
}
