#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qtail/packets.hpp"
#include "qtail/potential.hpp"

namespace qtail {

inline constexpr int kMaxZeroOrder = 4;

/// psi_tilde^(n)(sigma 0), indexed [index_of(side)][n].
using DerivativeTable = std::array<std::array<cplx, kMaxZeroOrder + 1>, 2>;

struct SpectralAmplitude {
  Eigen::VectorXd ks;
  Eigen::VectorXcd values;
  DerivativeTable deriv_at_zero{};
  int vanishing_order = -1;
  double support_violation = 0.0;
  std::string warning;
};

/// psi_tilde(k) = conj(gPlus) psi_hat(|k|) + conj(gMinus) psi_hat(-|k|), valid
/// for packets supported left of the potential. k != 0.
cplx spectral_value(const PotentialSpec& pot, const PacketSpec& packet, double k);

/// Same, from amplitudes already evaluated at kappa = |k|.
cplx spectral_value(const BranchAmplitudes& amp, const PacketSpec& packet, double k);

Eigen::VectorXcd spectral_values(const PotentialSpec& pot, const PacketSpec& packet,
                                 const Eigen::Ref<const Eigen::VectorXd>& ks);

/// Direct overlap \int conj(phi(y, k)) psi(y) dy by adaptive quadrature over
/// y, including the interior and right of the potential.
cplx spectral_value_direct(const PotentialSpec& pot, const PacketSpec& packet, double k);

/// psi_tilde^(n)(sigma 0), n <= 4, as a binomial combination of psi_hat^(l)(0)
/// and the branch derivatives of gMinus.
cplx derivatives_at_zero(const PotentialSpec& pot, const PacketSpec& packet, int n, Side side);
DerivativeTable derivative_table(const PotentialSpec& pot, const PacketSpec& packet);

/// One-sided Richardson finite difference of spectral_value (test oracle).
cplx derivative_finite_difference(const PotentialSpec& pot, const PacketSpec& packet, int n,
                                  Side side);

/// Smallest n with max_sigma |psi_tilde^(n)(sigma 0)| > tol * scale.
int vanishing_order(const DerivativeTable& table, double scale, double tol = 1e-8);
int vanishing_order(const PotentialSpec& pot, const PacketSpec& packet, double tol = 1e-8);

/// Log-spaced momenta down to |k| = 1e-4 joined with a uniform grid over the
/// packet support, symmetric about 0, zero excluded.
Eigen::VectorXd spectral_grid(const PacketSpec& packet, double step = 0.01);

/// Momentum window [lo, hi] outside which psi_tilde is negligible.
std::array<double, 2> spectral_support(const PacketSpec& packet);

/// \int |psi_tilde|^2 dk.
double spectral_norm(const PotentialSpec& pot, const PacketSpec& packet);

SpectralAmplitude build_spectral(const PotentialSpec& pot, const PacketSpec& packet,
                                 double tol = 1e-8, double support_warning = 1e-8);

}  // namespace qtail
