#include <doctest.h>

#include <cmath>

#include "qtail/calculus.hpp"
#include "qtail/potential.hpp"

using namespace qtail;

namespace {

const PotentialSpec barrier = square_barrier(16.0, 1.0);

Eigen::VectorXd log_momenta(int n, double lo, double hi) {
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) k(i) = lo * std::pow(hi / lo, double(i) / (n - 1));
  return k;
}

}  // namespace

TEST_CASE("potential construction") {
  CHECK(barrier.barrier_momentum() == doctest::Approx(4.0));
  CHECK(barrier(0.0) == 16.0);
  CHECK(barrier(1.5) == 0.0);
  CHECK(square_barrier(0.0, 1.0).is_free());
  CHECK_THROWS_AS(square_barrier(16.0, -1.0), Error);
  CHECK_THROWS_AS(square_barrier(-1.0, 1.0), Error);
  CHECK_THROWS_AS(piecewise_constant(1.0, {{-1.0, 0.5, 2.0}, {0.0, 1.0, 1.0}}), Error);
  CHECK_THROWS_AS(piecewise_constant(1.0, {{-1.0, 0.5, -2.0}}), Error);
  const PotentialSpec p = piecewise_constant(1.0, {{-0.5, 0.5, 3.0}});
  REQUIRE(p.regions().size() == 3);
  CHECK(p.regions().front().left == -1.0);
  CHECK(p.regions().back().right == 1.0);
}

TEST_CASE("amplitudes at the reference momenta") {
  CHECK(std::abs(amplitudes(barrier, 1e-6).gMinus + 1.0) < 1e-4);

  const ScatteringData free = amplitudes(square_barrier(0.0, 1.0), 0.7);
  CHECK(std::abs(free.gMinus) == 0.0);
  CHECK(std::abs(free.transmission() - 1.0) < 1e-15);

  // oracle: transfer-matrix product
  const ScatteringData d = amplitudes(barrier, 1.0);
  const ScatteringData tm = amplitudes(barrier, 1.0, AmplitudeMethod::TransferMatrix);
  CHECK(std::norm(tm.transmission()) == doctest::Approx(1.75e-7).epsilon(0.01));
  CHECK(std::abs(d.transmission() - tm.transmission()) < 1e-12);
  CHECK(std::abs(std::norm(d.transmission()) + std::norm(d.reflection()) - 1.0) < 1e-12);

  CHECK_THROWS_AS(amplitudes(barrier, 0.0), Error);
}

TEST_CASE("flux unitarity over 200 momenta of both signs") {
  const Eigen::VectorXd ks = log_momenta(200, 1e-4, 40.0);
  for (double k : ks)
    for (double s : {1.0, -1.0}) {
      const ScatteringData d = amplitudes(barrier, s * k);
      CHECK(std::abs(std::norm(d.transmission()) + std::norm(d.reflection()) - 1.0) < 1e-12);
    }
}

TEST_CASE("closed form agrees with the transfer matrix") {
  const Eigen::VectorXd ks = log_momenta(120, 1e-3, 40.0);
  double worst = 0.0;
  for (double k : ks)
    for (double s : {1.0, -1.0}) {
      const ScatteringData a = amplitudes(barrier, s * k, AmplitudeMethod::ClosedForm);
      const ScatteringData b = amplitudes(barrier, s * k, AmplitudeMethod::TransferMatrix);
      worst = std::max({worst, std::abs(a.gMinus - b.gMinus), std::abs(a.hPlus - b.hPlus)});
    }
  CHECK(worst < 1e-12);

  const PotentialSpec pw = barrier.as_piecewise();
  for (double k : {0.3, -0.3, 2.0, 5.0}) {
    CHECK(std::abs(amplitudes(pw, k).gMinus - amplitudes(barrier, k).gMinus) < 1e-12);
  }
}

TEST_CASE("amplitudes are continuous across k = k_b") {
  const cplx at = amplitudes(barrier, 4.0).gMinus;
  const cplx below = amplitudes(barrier, 4.0 - 1e-7).gMinus;
  const cplx above = amplitudes(barrier, 4.0 + 1e-7).gMinus;
  CHECK(std::abs(at - below) < 1e-5);
  CHECK(std::abs(at - above) < 1e-5);
  CHECK(std::isfinite(at.real()));
}

TEST_CASE("zero-energy total reflection with g(k)/k finite") {
  CHECK(std::abs(amplitudes(barrier, 1e-7).gMinus + 1.0) < 1e-6);
  CHECK(std::abs(amplitudes(barrier, -1e-7).gMinus) < 1e-6);
  const double r1 = std::abs(amplitudes(barrier, 1e-4).transmission()) / 1e-4;
  const double r2 = std::abs(amplitudes(barrier, 1e-5).transmission()) / 1e-5;
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-4));
}

TEST_CASE("stationary states") {
  Eigen::VectorXd x(1);
  x << -5.0;
  CHECK(std::abs(scattering_state(barrier, 1e-6, x)(0)) <= 1e-5);

  const PotentialSpec free = square_barrier(0.0, 1.0);
  Eigen::VectorXd xs(3);
  xs << -3.0, 0.2, 4.0;
  const Eigen::VectorXcd v = scattering_state(free, 0.8, xs);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(v(i) - std::exp(cplx(0, 0.8 * xs(i))) * inv_sqrt_2pi) < 1e-15);

  CHECK_THROWS_AS(scattering_state(barrier, 0.0, xs), Error);
}

TEST_CASE("continuity at the potential edges") {
  for (Side s : {Side::Plus, Side::Minus}) {
    const BranchAmplitudes amp = branch_amplitudes(barrier, s, 1.0);
    for (double edge : {-1.0, 1.0}) {
      const StateValue in = branch_state_interior(barrier, amp, 1.0, edge);
      const StateValue out = branch_state_exterior(amp, 1.0, edge);
      CHECK(std::abs(in.value - out.value) < 1e-10);
      CHECK(std::abs(in.slope - out.slope) < 1e-10);
    }
  }
}

TEST_CASE("closed-form zero-momentum limits of g-") {
  CHECK(std::abs(g_minus_derivative_at_zero(barrier, Side::Plus, 0) + 1.0) < 1e-15);
  CHECK(std::abs(g_minus_derivative_at_zero(barrier, Side::Minus, 0)) < 1e-15);
  const cplx minus1 = g_minus_derivative_at_zero(barrier, Side::Minus, 1);
  const cplx plus1 = g_minus_derivative_at_zero(barrier, Side::Plus, 1);
  CHECK(std::abs(minus1 - cplx(0, 2.0 / (4.0 * std::sinh(8.0)))) < 1e-15);
  CHECK(std::abs(minus1.imag() - 3.3546e-4) < 1e-8);
  CHECK(std::abs(plus1 - cplx(0, 2.0 - 0.5 / std::tanh(8.0))) < 1e-12);

  // oracle: one-sided finite differences of the amplitude
  for (Side s : {Side::Plus, Side::Minus}) {
    auto g = [&](double k) { return amplitudes(barrier, k).gMinus; };
    const cplx fd = one_sided_derivative<cplx>(g, 1, sign_of(s), 1e-3, 3);
    CHECK(std::abs(fd - g_minus_derivative_at_zero(barrier, s, 1)) < 1e-6);
  }

  CHECK_THROWS_AS(g_minus_derivative_at_zero(square_barrier(0.0, 1.0), Side::Plus, 0), Error);
  CHECK_THROWS_AS(g_minus_derivative_at_zero(barrier, Side::Plus, 2), Error);
}

TEST_CASE("higher branch derivatives agree with finite differences") {
  for (Side s : {Side::Plus, Side::Minus}) {
    const BranchDerivatives bd = branch_derivatives_at_zero(barrier, s, 4);
    auto g = [&](double k) { return amplitudes(barrier, k).gMinus; };
    for (int n = 0; n <= 3; ++n) {
      // third differences of g- lose ~eps / h^3 to roundoff
      const cplx fd = one_sided_derivative<cplx>(g, n, sign_of(s), 1e-2, 5);
      const double tol = n < 3 ? 1e-6 : 2e-5;
      CHECK(std::abs(bd.gMinus[n] - fd) < tol * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("k-derivative of the stationary state at zero momentum") {
  Eigen::VectorXd x(1);
  x << -20.0;
  const cplx plus = dk_phi_at_zero(barrier, Side::Plus, x)(0);
  CHECK(std::abs(plus - cplx(0, -40.0 + 2.0 - 0.5 / std::tanh(8.0)) * inv_sqrt_2pi) < 1e-12);
  CHECK(std::abs(plus - cplx(0, -15.359)) < 1e-3);

  const cplx minus = dk_phi_at_zero(barrier, Side::Minus, x)(0);
  CHECK(std::abs(minus - g_minus_derivative_at_zero(barrier, Side::Minus, 1) * inv_sqrt_2pi) <
        1e-15);

  // oracle: Richardson differences of phi(x, k)
  for (Side s : {Side::Plus, Side::Minus}) {
    auto f = [&](double k) { return scattering_state(barrier, k, x)(0); };
    const cplx fd = one_sided_derivative<cplx>(f, 1, sign_of(s), 1e-3, 3);
    CHECK(std::abs(fd - dk_phi_at_zero(barrier, s, x)(0)) < 1e-6);
  }

  const PotentialSpec free = square_barrier(0.0, 1.0);
  CHECK(std::abs(dk_phi_at_zero(free, Side::Plus, x)(0) - cplx(0, -20.0) * inv_sqrt_2pi) < 1e-14);
}

TEST_CASE("phi derivatives inside the barrier match finite differences") {
  Eigen::VectorXd xs(3);
  xs << -0.5, 0.3, 2.0;
  for (Side s : {Side::Plus, Side::Minus}) {
    const Eigen::MatrixXcd d = phi_derivatives_at_zero(barrier, s, xs, 3);
    for (int i = 0; i < xs.size(); ++i) {
      Eigen::VectorXd xi(1);
      xi << xs(i);
      auto f = [&](double k) { return scattering_state(barrier, k, xi)(0); };
      for (int r = 0; r <= 2; ++r) {
        const cplx fd = one_sided_derivative<cplx>(f, r, sign_of(s));
        CHECK(std::abs(d(i, r) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}
