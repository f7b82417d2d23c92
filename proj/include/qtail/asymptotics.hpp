#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qtail/packets.hpp"
#include "qtail/potential.hpp"
#include "qtail/spectral.hpp"

namespace qtail {

/// coefficient * (i t)^{-power} with the principal branch.
struct TailTerm {
  double power = 0.0;
  Eigen::VectorXcd coefficient;  // plus + minus
  Eigen::VectorXcd plus;         // k -> +0 contribution
  Eigen::VectorXcd minus;        // k -> -0 contribution
};

/// Leading part of the long-time expansion of psi(x, t):
///   psi ~ sum_n Gamma((n+1)/2) / 2 * sum_sigma sigma^n F_{sigma,n}(x) (it)^{-(n+1)/2}
/// where F_{sigma,n} is the n-th Taylor coefficient at k = sigma 0 of
/// phi(x, k) psi_tilde(k). Only the orders n = m and n = m + 1 are kept.
struct TailExpansion {
  int m = -1;
  int m_bar = 0;
  bool even = true;  // m = 2 m_bar (even) or m = 2 m_bar - 1 (odd)
  Eigen::VectorXd xs;
  std::vector<TailTerm> terms;  // increasing power
  std::string classification;
};

/// Maximum m for which both needed spectral derivatives are available.
inline constexpr int kMaxTailOrder = kMaxZeroOrder - 1;

/// Derivatives of the energy-odd and energy-even parts at E = 0, from the
/// k-Taylor data: d^j O_sigma = j! F_{sigma,2j+1}, d^j E_sigma = j! F_{sigma,2j}.
/// phi_derivs columns are d^r phi/dk^r (x, sigma 0), spectral[s] = psi_tilde^(s)(sigma 0).
cplx energy_odd_derivative(const Eigen::Ref<const Eigen::RowVectorXcd>& phi_derivs,
                           const std::array<cplx, kMaxZeroOrder + 1>& spectral, int j);
cplx energy_even_derivative(const Eigen::Ref<const Eigen::RowVectorXcd>& phi_derivs,
                            const std::array<cplx, kMaxZeroOrder + 1>& spectral, int j);

/// m < 0 selects the vanishing order from the spectral data.
TailExpansion tail_expansion(const PotentialSpec& pot, const PacketSpec& packet,
                             const Eigen::Ref<const Eigen::VectorXd>& xs, int m = -1,
                             double tol = 1e-8);

/// Coefficients of the two leading powers written directly in terms of
/// phi(x, +-0), d_k phi(x, +-0), psi_tilde^(m)(+-0) and psi_tilde^(m+1)(+-0).
/// Same layout as TailExpansion::terms.
std::vector<TailTerm> explicit_leading_terms(const PotentialSpec& pot, const PacketSpec& packet,
                                             const Eigen::Ref<const Eigen::VectorXd>& xs, int m);

/// |sum_sigma (|plus| + |minus|)|^2 (t)^{-2p} of the leading nonvanishing term:
/// an upper envelope without the interference between the two limits.
double tail_envelope(const TailExpansion& expansion, Eigen::Index i, double t);

/// Sum of all terms at sample index i.
cplx tail_value(const TailExpansion& expansion, Eigen::Index i, double t);
Eigen::VectorXcd tail_values(const TailExpansion& expansion, double t);

/// Index and power of the first term whose coefficient does not vanish
/// (relative tolerance against the largest coefficient).
int leading_term(const TailExpansion& expansion, double tol = 1e-10);

}  // namespace qtail
