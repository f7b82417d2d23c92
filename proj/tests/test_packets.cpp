#include <doctest.h>

#include <cmath>

#include "qtail/calculus.hpp"
#include "qtail/packets.hpp"
#include "qtail/quadrature.hpp"

using namespace qtail;

namespace {

double simpson(const Eigen::VectorXd& xs, const Eigen::VectorXd& f) {
  const Eigen::Index n = xs.size() - 1;
  const double h = (xs(n) - xs(0)) / n;
  double s = f(0) + f(n);
  for (Eigen::Index i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("normalization constants") {
  CHECK(normalize(0, 1.0, 1.0, -20.0).norm == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-13));
  CHECK(normalize(2, 1.0, 0.0, 0.0).norm ==
        doctest::Approx(std::pow(3.0 * std::sqrt(pi) / 4.0, -0.5)).epsilon(1e-13));
  for (int m : {0, 1, 2, 3}) {
    const PacketSpec p = normalize(m, 1.0, 1.0, -20.0);
    CHECK(p.norm == doctest::Approx(normalization_closed_form(m, 1.0, 1.0)).epsilon(1e-12));
    CHECK(std::abs(normalize(p).norm - p.norm) < 1e-14 * p.norm);
  }
  CHECK_THROWS_AS(normalize(0, 0.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(normalize(-1, 1.0, 1.0, 0.0), Error);
}

TEST_CASE("momentum amplitude structure") {
  const PacketSpec p2 = normalize(2, 1.0, 1.0, -20.0);
  CHECK(momentum_amplitude(p2, 0.0) == cplx(0.0, 0.0));

  const PacketSpec odd = normalize(1, 1.0, 0.0, 0.0);
  for (double k : {0.3, 1.1, 2.5})
    CHECK(std::abs(momentum_amplitude(odd, -k) + momentum_amplitude(odd, k)) < 1e-15);

  const PacketSpec p0 = normalize(0, 1.0, 1.0, -20.0);
  CHECK(std::abs(momentum_amplitude(p0, 1.0)) == doctest::Approx(std::pow(pi, -0.25)));
}

TEST_CASE("unit norm in momentum space and Parseval") {
  for (int m : {0, 1, 2}) {
    const PacketSpec p = normalize(m, 1.0, 1.0, -20.0);
    const auto r = integrate([&](double k) { return std::norm(momentum_amplitude(p, k)); }, -12.0,
                             14.0, 1e-14);
    CHECK(std::abs(r.value - 1.0) < 1e-10);

    const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(4001, -36.0, -4.0);
    const Eigen::VectorXcd psi = position_amplitude(p, xs);
    CHECK(std::abs(simpson(xs, psi.cwiseAbs2()) - 1.0) < 1e-8);
    CHECK((psi - position_amplitude_exact(p, xs)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("self-reciprocal Gaussian peak") {
  const PacketSpec p = normalize(0, 1.0, 0.0, 0.0);
  Eigen::VectorXd x(1);
  x << 0.0;
  CHECK(std::abs(position_amplitude(p, x)(0) - std::pow(pi, -0.25)) < 1e-12);
  CHECK(std::abs(position_amplitude_exact(p, 0.0) - std::pow(pi, -0.25)) < 1e-14);
  CHECK(std::norm(position_amplitude_exact(p, 0.7)) ==
        doctest::Approx(std::exp(-0.49) / std::sqrt(pi)).epsilon(1e-13));
}

TEST_CASE("momentum derivatives at zero: vanishing through m - 1") {
  for (int m : {0, 1, 2}) {
    const PacketSpec p = normalize(m, 1.0, 1.0, -20.0);
    const auto exact = momentum_derivatives_at_zero(p, 4);
    auto f = [&](double k) { return momentum_amplitude(p, k); };
    for (int l = 0; l <= 3; ++l) {
      const cplx right = one_sided_derivative<cplx>(f, l, +1);
      const cplx left = one_sided_derivative<cplx>(f, l, -1);
      const double scale = std::max(1.0, std::abs(exact[l]));
      CHECK(std::abs(right - exact[l]) < 1e-6 * scale);
      CHECK(std::abs(left - right) < 1e-6 * scale);
      if (l < m) CHECK(std::abs(exact[l]) == 0.0);
      if (l == m) CHECK(std::abs(right) > 1e-3);
    }
  }
}

TEST_CASE("rapid decrease outside the truncation window") {
  for (int m : {0, 1, 2}) {
    const PacketSpec p = normalize(m, 1.0, 1.0, -20.0);
    const double w = truncation_half_width(p);
    for (double d : {1.0001, 1.2, 2.0})
      for (double s : {1.0, -1.0}) CHECK(std::abs(momentum_amplitude(p, p.k0 + s * d * w)) < 1e-12);
    CHECK(truncation_tail_bound(p) < 1e-12);
  }
}

TEST_CASE("support violation") {
  const PotentialSpec pot = square_barrier(16.0, 1.0);
  const PacketSpec p0 = normalize(0, 1.0, 1.0, -20.0);
  // |psi|^2 is a Gaussian of variance 1/2 about x0: mass beyond -R is erfc(19)/2
  const double bound = 0.5 * std::erfc(19.0);
  const double v = support_violation(p0, pot);
  CHECK(v <= 1e-100);
  CHECK(v == doctest::Approx(bound).epsilon(1e-6));
  CHECK(support_violation(normalize(2, 1.0, 1.0, -20.0), pot) < 1e-40);
  CHECK(support_violation(normalize(0, 1.0, 1.0, -1.0), pot) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(support_violation(normalize(0, 1.0, 1.0, 20.0), pot) == doctest::Approx(1.0).epsilon(1e-10));
}
