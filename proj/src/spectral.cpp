#include "qtail/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtail/calculus.hpp"
#include "qtail/quadrature.hpp"

namespace qtail {

cplx spectral_value(const BranchAmplitudes& amp, const PacketSpec& packet, double k) {
  const double kappa = std::abs(k);
  return std::conj(amp.gPlus) * momentum_amplitude(packet, kappa) +
         std::conj(amp.gMinus) * momentum_amplitude(packet, -kappa);
}

cplx spectral_value(const PotentialSpec& pot, const PacketSpec& packet, double k) {
  if (k == 0.0) throw Error("spectral_value: k = 0 is rejected; use derivatives_at_zero");
  const Side side = k > 0 ? Side::Plus : Side::Minus;
  return spectral_value(branch_amplitudes(pot, side, std::abs(k)), packet, k);
}

Eigen::VectorXcd spectral_values(const PotentialSpec& pot, const PacketSpec& packet,
                                 const Eigen::Ref<const Eigen::VectorXd>& ks) {
  Eigen::VectorXcd out(ks.size());
  for (Eigen::Index i = 0; i < ks.size(); ++i) out(i) = spectral_value(pot, packet, ks(i));
  return out;
}

cplx spectral_value_direct(const PotentialSpec& pot, const PacketSpec& packet, double k) {
  if (k == 0.0) throw Error("spectral_value_direct: k = 0 is rejected");
  const Side side = k > 0 ? Side::Plus : Side::Minus;
  const double kappa = std::abs(k);
  const BranchAmplitudes amp = branch_amplitudes(pot, side, kappa);
  auto integrand = [&](double y) {
    const cplx phi = branch_state(pot, amp, kappa, y).value * inv_sqrt_2pi;
    return std::conj(phi) * position_amplitude_exact(packet, y);
  };
  const double r = pot.range();
  const double reach = 12.0 * packet.a0 + 2.0 * packet.m;
  std::vector<double> cuts{std::min(packet.x0 - reach, -r), -r, r,
                           std::max(packet.x0 + reach, r + reach)};
  if (packet.x0 < -r) cuts.insert(cuts.begin() + 1, packet.x0);
  std::sort(cuts.begin(), cuts.end());
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * (kappa + 1.0))));
    sum += integrate_complex_panels(integrand, a, b, panels, 1e-12);
  }
  return sum;
}

cplx derivatives_at_zero(const PotentialSpec& pot, const PacketSpec& packet, int n, Side side) {
  if (n < 0 || n > kMaxZeroOrder) throw Error("derivatives_at_zero: order must be 0..4");
  return derivative_table(pot, packet)[index_of(side)][n];
}

DerivativeTable derivative_table(const PotentialSpec& pot, const PacketSpec& packet) {
  DerivativeTable t{};
  for (Side s : {Side::Plus, Side::Minus}) {
    const BranchDerivatives bd = branch_derivatives_at_zero(pot, s, kMaxZeroOrder);
    const std::vector<cplx> hat = momentum_derivatives_at_zero(packet, kMaxZeroOrder);
    const double sigma = sign_of(s);
    for (int n = 0; n <= kMaxZeroOrder; ++n) {
      cplx sum = s == Side::Plus ? hat[n] : cplx{0.0, 0.0};
      for (int l = 0; l <= n; ++l)
        sum += binomial(n, l) * std::pow(-sigma, l) * std::conj(bd.gMinus[n - l]) * hat[l];
      t[index_of(s)][n] = sum;
    }
  }
  return t;
}

cplx derivative_finite_difference(const PotentialSpec& pot, const PacketSpec& packet, int n,
                                  Side side) {
  auto f = [&](double k) { return spectral_value(pot, packet, k); };
  return one_sided_derivative<cplx>(f, n, sign_of(side), 4e-3, 4);
}

int vanishing_order(const DerivativeTable& table, double scale, double tol) {
  for (int n = 0; n <= kMaxZeroOrder; ++n) {
    const double mag = std::max(std::abs(table[0][n]), std::abs(table[1][n]));
    if (mag > tol * scale) return n;
  }
  throw Error("vanishing_order: order undetermined (all derivatives through order 4 vanish)");
}

int vanishing_order(const PotentialSpec& pot, const PacketSpec& packet, double tol) {
  const Eigen::VectorXcd v = spectral_values(pot, packet, spectral_grid(packet));
  return vanishing_order(derivative_table(pot, packet), v.cwiseAbs().maxCoeff(), tol);
}

std::array<double, 2> spectral_support(const PacketSpec& packet) {
  const double w = truncation_half_width(packet);
  return {std::min(0.0, packet.k0 - w), std::max(packet.k0 + w, w - packet.k0)};
}

Eigen::VectorXd spectral_grid(const PacketSpec& packet, double step) {
  const auto [lo, hi] = spectral_support(packet);
  std::vector<double> ks;
  const int per_decade = 20;
  for (int i = 0; i < 3 * per_decade; ++i) {
    const double k = std::pow(10.0, -4.0 + double(i) / per_decade);
    ks.push_back(k);
    ks.push_back(-k);
  }
  for (double k = 0.1; k <= hi + 1e-12; k += step) ks.push_back(k);
  for (double k = -0.1; k >= lo - 1e-12; k -= step) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  return Eigen::Map<Eigen::VectorXd>(ks.data(), static_cast<Eigen::Index>(ks.size()));
}

double spectral_norm(const PotentialSpec& pot, const PacketSpec& packet) {
  const auto [lo, hi] = spectral_support(packet);
  auto density = [&](double k) { return k == 0.0 ? 0.0 : std::norm(spectral_value(pot, packet, k)); };
  std::vector<double> cuts{lo, 0.0, hi};
  const double kb = pot.barrier_momentum();
  for (double c : {-kb, kb})
    if (c > lo && c < hi && c != 0.0) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * 10.0)));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
      sum += integrate(density, a + p * h, a + (p + 1) * h, 1e-13, 15).value;
  }
  return sum;
}

SpectralAmplitude build_spectral(const PotentialSpec& pot, const PacketSpec& packet, double tol,
                                 double support_warning) {
  SpectralAmplitude s;
  s.ks = spectral_grid(packet);
  s.values = spectral_values(pot, packet, s.ks);
  s.deriv_at_zero = derivative_table(pot, packet);
  s.vanishing_order = vanishing_order(s.deriv_at_zero, s.values.cwiseAbs().maxCoeff(), tol);
  s.support_violation = support_violation(packet, pot);
  if (s.support_violation > support_warning) {
    std::ostringstream os;
    os << "packet mass " << s.support_violation
       << " lies on [-R, inf); the closed-form spectral amplitude assumes it is negligible";
    s.warning = os.str();
  }
  return s;
}

}  // namespace qtail
