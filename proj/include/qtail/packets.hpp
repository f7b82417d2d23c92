#pragma once

#include <vector>

#include <Eigen/Core>

#include "qtail/potential.hpp"
#include "qtail/types.hpp"

namespace qtail {

/// psi_hat(k) = norm * k^m * exp(-a0^2 (k - k0)^2 / 2 - i k x0).
struct PacketSpec {
  int m = 0;
  double a0 = 1.0;
  double k0 = 1.0;
  double x0 = -20.0;
  double norm = 1.0;
};

/// Computes the normalization by adaptive quadrature. Throws Error for
/// a0 <= 0 or m < 0.
PacketSpec normalize(int m, double a0, double k0, double x0);
PacketSpec normalize(const PacketSpec& spec);

/// Gaussian-moment closed form of the normalization (same value, used as
/// a cross-check).
double normalization_closed_form(int m, double a0, double k0);

cplx momentum_amplitude(const PacketSpec& spec, double k);
Eigen::VectorXcd momentum_amplitude(const PacketSpec& spec,
                                    const Eigen::Ref<const Eigen::VectorXd>& ks);

/// psi_hat^(l)(0) for l = 0..nmax, from the Taylor recurrence of the
/// Gaussian factor.
std::vector<cplx> momentum_derivatives_at_zero(const PacketSpec& spec, int nmax);

/// Half-width of the momentum window around k0 kept by every quadrature.
inline double truncation_half_width(const PacketSpec& spec) { return 8.0 / spec.a0; }

/// Bound on (2 pi)^{-1/2} \int |psi_hat| over |k - k0| > 8/a0, i.e. on the
/// pointwise error of any truncated transform.
double truncation_tail_bound(const PacketSpec& spec);

/// psi(x) by Gauss-Legendre quadrature of the inverse transform over the
/// truncated momentum window.
Eigen::VectorXcd position_amplitude(const PacketSpec& spec,
                                    const Eigen::Ref<const Eigen::VectorXd>& xs);

/// psi(x) from the Gaussian-moment closed form. Accurate far into the tails,
/// unlike the quadrature.
cplx position_amplitude_exact(const PacketSpec& spec, double x);
Eigen::VectorXcd position_amplitude_exact(const PacketSpec& spec,
                                          const Eigen::Ref<const Eigen::VectorXd>& xs);

/// Probability mass of psi on [-R, infinity).
double support_violation(const PacketSpec& spec, const PotentialSpec& pot);

}  // namespace qtail
