#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qtail/packets.hpp"
#include "qtail/potential.hpp"
#include "qtail/spectral.hpp"

using namespace qtail;

namespace {

const PotentialSpec barrier = square_barrier(16.0, 1.0);
const PotentialSpec free_pot = square_barrier(0.0, 1.0);

PacketSpec packet(int m) { return normalize(m, 1.0, 1.0, -20.0); }

}  // namespace

TEST_CASE("free particle: spectral amplitude equals momentum amplitude") {
  for (int m : {0, 1, 2})
    for (double k : {-2.0, -0.3, 1e-3, 0.9, 3.0})
      CHECK(std::abs(spectral_value(free_pot, packet(m), k) - momentum_amplitude(packet(m), k)) <
            1e-15);
}

TEST_CASE("spectral amplitude vanishes at zero momentum behind the barrier") {
  for (int m : {0, 1, 2}) {
    const PacketSpec p = packet(m);
    CHECK(std::abs(spectral_value(barrier, p, 1e-10)) < 1e-8);
    CHECK(std::abs(spectral_value(barrier, p, -1e-10)) < 1e-8);
    const DerivativeTable t = derivative_table(barrier, p);
    CHECK(std::abs(t[0][0]) < 1e-8);
    CHECK(std::abs(t[1][0]) < 1e-8);
  }
  CHECK_THROWS_AS(spectral_value(barrier, packet(0), 0.0), Error);
}

TEST_CASE("closed form agrees with the direct overlap integral") {
  for (int m : {0, 2})
    for (double k : {0.5, -0.5, 2.0}) {
      const cplx a = spectral_value(barrier, packet(m), k);
      const cplx b = spectral_value_direct(barrier, packet(m), k);
      CHECK(std::abs(a - b) < 1e-6);
    }
}

TEST_CASE("first derivative for phi0 from the minus side") {
  const PacketSpec p = packet(0);
  const cplx expected =
      std::conj(g_minus_derivative_at_zero(barrier, Side::Minus, 1)) * momentum_amplitude(p, 0.0);
  CHECK(std::abs(derivatives_at_zero(barrier, p, 1, Side::Minus) - expected) < 1e-14);
}

TEST_CASE("phi2: first two derivatives vanish, third follows the binomial formula") {
  const PacketSpec p = packet(2);
  const auto hat = momentum_derivatives_at_zero(p, 4);
  for (Side s : {Side::Plus, Side::Minus}) {
    CHECK(std::abs(derivatives_at_zero(barrier, p, 1, s)) < 1e-8);
    CHECK(std::abs(derivatives_at_zero(barrier, p, 2, s)) < 1e-8);
    const double delta = s == Side::Plus ? 1.0 : 0.0;
    const cplx expected =
        3.0 * std::conj(g_minus_derivative_at_zero(barrier, s, 1)) * hat[2] + 2.0 * delta * hat[3];
    CHECK(std::abs(derivatives_at_zero(barrier, p, 3, s) - expected) < 1e-10 * std::abs(expected));
    CHECK(std::abs(expected) > 1e-6);
  }
}

TEST_CASE("analytic derivatives match finite differences for all packets") {
  for (int m : {0, 1, 2}) {
    const PacketSpec p = packet(m);
    for (Side s : {Side::Plus, Side::Minus})
      for (int n = 0; n <= 3; ++n) {
        const cplx a = derivatives_at_zero(barrier, p, n, s);
        const cplx fd = derivative_finite_difference(barrier, p, n, s);
        CHECK(std::abs(a - fd) <= 1e-6 * std::max(1.0, std::abs(a)));
      }
  }
}

TEST_CASE("vanishing orders") {
  CHECK(vanishing_order(barrier, packet(0)) == 1);
  CHECK(vanishing_order(barrier, packet(1)) == 1);
  CHECK(vanishing_order(barrier, packet(2)) == 3);
  CHECK(vanishing_order(free_pot, packet(0)) == 0);
  CHECK(vanishing_order(free_pot, packet(2)) == 2);
  DerivativeTable zeros{};
  CHECK_THROWS_AS(vanishing_order(zeros, 1.0), Error);
}

TEST_CASE("completeness of the spectral amplitude") {
  for (int m : {0, 1, 2}) CHECK(std::abs(spectral_norm(barrier, packet(m)) - 1.0) < 1e-6);
}

TEST_CASE("spectral grid layout") {
  const Eigen::VectorXd ks = spectral_grid(packet(0));
  CHECK(std::is_sorted(ks.data(), ks.data() + ks.size()));
  CHECK((ks.array() != 0.0).all());
  CHECK(ks.cwiseAbs().minCoeff() == doctest::Approx(1e-4));
  const auto support = spectral_support(packet(0));
  CHECK(ks(0) <= support[0] + 0.01);
  CHECK(ks(ks.size() - 1) >= support[1] - 0.01);
  const auto near_pos = (ks.array() > 0.0 && ks.array() < 0.1).count();
  const auto near_neg = (ks.array() < 0.0 && ks.array() > -0.1).count();
  CHECK(near_pos == near_neg);
  CHECK(near_pos == 60);
}

TEST_CASE("build_spectral bundles the data") {
  const SpectralAmplitude s = build_spectral(barrier, packet(2));
  CHECK(s.vanishing_order == 3);
  CHECK(s.values.size() == s.ks.size());
  CHECK(s.support_violation < 1e-40);
  CHECK(s.warning.empty());
  const SpectralAmplitude bad = build_spectral(barrier, normalize(0, 1.0, 1.0, -1.0));
  CHECK(!bad.warning.empty());
}
