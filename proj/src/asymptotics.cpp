#include "qtail/asymptotics.hpp"

#include <cmath>
#include <sstream>

#include "qtail/calculus.hpp"

namespace qtail {

namespace {

cplx taylor_product(const Eigen::Ref<const Eigen::RowVectorXcd>& phi,
                    const std::array<cplx, kMaxZeroOrder + 1>& spec, int n) {
  if (n > phi.size() - 1 || n > kMaxZeroOrder)
    throw Error("tail expansion: Taylor data missing for order " + std::to_string(n));
  cplx sum{0.0, 0.0};
  for (int r = 0; r <= n; ++r) sum += phi(r) / factorial(r) * spec[n - r] / factorial(n - r);
  return sum;
}

std::string classify(int m) {
  std::ostringstream os;
  if (m % 2 == 0) {
    os << "even m = " << m << " (m_bar = " << m / 2 << "): powers " << m / 2 << "+1/2 and "
       << m / 2 + 1;
  } else {
    os << "odd m = " << m << " (m_bar = " << (m + 1) / 2 << "): powers " << (m + 1) / 2
       << " and " << (m + 1) / 2 << "+1/2";
  }
  return os.str();
}

}  // namespace

cplx energy_odd_derivative(const Eigen::Ref<const Eigen::RowVectorXcd>& phi_derivs,
                           const std::array<cplx, kMaxZeroOrder + 1>& spectral, int j) {
  return factorial(j) * taylor_product(phi_derivs, spectral, 2 * j + 1);
}

cplx energy_even_derivative(const Eigen::Ref<const Eigen::RowVectorXcd>& phi_derivs,
                            const std::array<cplx, kMaxZeroOrder + 1>& spectral, int j) {
  return factorial(j) * taylor_product(phi_derivs, spectral, 2 * j);
}

TailExpansion tail_expansion(const PotentialSpec& pot, const PacketSpec& packet,
                             const Eigen::Ref<const Eigen::VectorXd>& xs, int m, double tol) {
  const DerivativeTable table = derivative_table(pot, packet);
  if (m < 0) m = vanishing_order(pot, packet, tol);
  if (m > kMaxTailOrder)
    throw Error("tail_expansion: vanishing order " + std::to_string(m) + " exceeds supported 3");

  TailExpansion e;
  e.m = m;
  e.even = m % 2 == 0;
  e.m_bar = e.even ? m / 2 : (m + 1) / 2;
  e.xs = xs;
  e.classification = classify(m);

  const Eigen::MatrixXcd phi_p = phi_derivatives_at_zero(pot, Side::Plus, xs, m + 1);
  const Eigen::MatrixXcd phi_m = phi_derivatives_at_zero(pot, Side::Minus, xs, m + 1);
  for (int n = m; n <= m + 1; ++n) {
    TailTerm term;
    term.power = 0.5 * (n + 1);
    term.coefficient.resize(xs.size());
    term.plus.resize(xs.size());
    term.minus.resize(xs.size());
    const int j = n / 2;
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      if (n % 2 == 0) {
        const double g = std::tgamma(j + 0.5) / (2.0 * factorial(j));
        term.plus(i) = g * energy_even_derivative(phi_p.row(i), table[0], j);
        term.minus(i) = g * energy_even_derivative(phi_m.row(i), table[1], j);
      } else {
        term.plus(i) = 0.5 * energy_odd_derivative(phi_p.row(i), table[0], j);
        term.minus(i) = -0.5 * energy_odd_derivative(phi_m.row(i), table[1], j);
      }
      term.coefficient(i) = term.plus(i) + term.minus(i);
    }
    e.terms.push_back(std::move(term));
  }
  return e;
}

std::vector<TailTerm> explicit_leading_terms(const PotentialSpec& pot, const PacketSpec& packet,
                                             const Eigen::Ref<const Eigen::VectorXd>& xs, int m) {
  if (m < 0 || m > kMaxTailOrder) throw Error("explicit_leading_terms: m must be 0..3");
  const DerivativeTable table = derivative_table(pot, packet);
  const Eigen::MatrixXcd phi_p = phi_derivatives_at_zero(pot, Side::Plus, xs, 1);
  const Eigen::MatrixXcd phi_m = phi_derivatives_at_zero(pot, Side::Minus, xs, 1);
  const double fm = factorial(m), fm1 = factorial(m + 1);
  std::vector<TailTerm> out(2);
  out[0].power = 0.5 * (m + 1);
  out[1].power = 0.5 * (m + 2);
  for (auto& term : out) {
    term.coefficient.resize(xs.size());
    term.plus.resize(xs.size());
    term.minus.resize(xs.size());
  }
  const double g0 = std::tgamma(0.5 * (m + 1)) / 2.0;
  const double g1 = std::tgamma(0.5 * (m + 2)) / 2.0;
  const double s0 = m % 2 == 0 ? 1.0 : -1.0;  // (-1)^m on the k -> -0 side
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const cplx lead_p = phi_p(i, 0) * table[0][m] / fm;
    const cplx lead_m = phi_m(i, 0) * table[1][m] / fm;
    out[0].plus(i) = g0 * lead_p;
    out[0].minus(i) = g0 * s0 * lead_m;
    out[0].coefficient(i) = out[0].plus(i) + out[0].minus(i);
    const cplx next_p = phi_p(i, 1) * table[0][m] / fm + phi_p(i, 0) * table[0][m + 1] / fm1;
    const cplx next_m = phi_m(i, 1) * table[1][m] / fm + phi_m(i, 0) * table[1][m + 1] / fm1;
    out[1].plus(i) = g1 * next_p;
    out[1].minus(i) = -g1 * s0 * next_m;
    out[1].coefficient(i) = out[1].plus(i) + out[1].minus(i);
  }
  return out;
}

cplx tail_value(const TailExpansion& expansion, Eigen::Index i, double t) {
  if (!(t > 0.0)) throw Error("tail_value: t must be positive");
  const cplx it(0.0, t);
  cplx sum{0.0, 0.0};
  for (const auto& term : expansion.terms) sum += term.coefficient(i) * std::pow(it, -term.power);
  return sum;
}

double tail_envelope(const TailExpansion& expansion, Eigen::Index i, double t) {
  if (!(t > 0.0)) throw Error("tail_envelope: t must be positive");
  const int lead = leading_term(expansion);
  if (lead < 0) return 0.0;
  const TailTerm& term = expansion.terms[lead];
  const double amp = std::abs(term.plus(i)) + std::abs(term.minus(i));
  return amp * amp * std::pow(t, -2.0 * term.power);
}

Eigen::VectorXcd tail_values(const TailExpansion& expansion, double t) {
  Eigen::VectorXcd out(expansion.xs.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = tail_value(expansion, i, t);
  return out;
}

int leading_term(const TailExpansion& expansion, double tol) {
  double biggest = 0.0;
  for (const auto& term : expansion.terms)
    biggest = std::max(biggest, term.coefficient.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < expansion.terms.size(); ++i)
    if (expansion.terms[i].coefficient.cwiseAbs().maxCoeff() > tol * biggest)
      return static_cast<int>(i);
  return -1;
}

}  // namespace qtail
