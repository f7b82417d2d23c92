#include "qtail/packets.hpp"

#include <algorithm>
#include <cmath>

#include "qtail/calculus.hpp"
#include "qtail/quadrature.hpp"

namespace qtail {

namespace {

constexpr cplx I{0.0, 1.0};

double double_factorial_odd(int j) {  // (j - 1)!! for even j
  double r = 1.0;
  for (int i = j - 1; i > 1; i -= 2) r *= i;
  return r;
}

void check(int m, double a0) {
  if (!(a0 > 0.0)) throw Error("packet: a0 must be positive");
  if (m < 0) throw Error("packet: m must be a nonnegative integer");
}

}  // namespace

double normalization_closed_form(int m, double a0, double k0) {
  check(m, a0);
  // \int k^{2m} e^{-a^2 (k-k0)^2} dk = sqrt(pi)/a E[(k0 + u)^{2m}], u ~ N(0, 1/(2a^2)).
  const double var = 1.0 / (2.0 * a0 * a0);
  double moment = 0.0;
  for (int j = 0; j <= 2 * m; j += 2)
    moment += binomial(2 * m, j) * std::pow(k0, 2 * m - j) * double_factorial_odd(j) *
              std::pow(var, j / 2);
  return 1.0 / std::sqrt(std::sqrt(pi) / a0 * moment);
}

PacketSpec normalize(int m, double a0, double k0, double x0) {
  check(m, a0);
  PacketSpec p{m, a0, k0, x0, 1.0};
  auto density = [&](double k) {
    return std::pow(k, 2 * m) * std::exp(-a0 * a0 * (k - k0) * (k - k0));
  };
  const double lo = std::min(k0, 0.0) - 20.0 / a0;
  const double hi = std::max(k0, 0.0) + 20.0 / a0;
  const double mass = integrate(density, lo, k0, 1e-14).value + integrate(density, k0, hi, 1e-14).value;
  p.norm = 1.0 / std::sqrt(mass);
  return p;
}

PacketSpec normalize(const PacketSpec& spec) {
  return normalize(spec.m, spec.a0, spec.k0, spec.x0);
}

cplx momentum_amplitude(const PacketSpec& s, double k) {
  const double d = k - s.k0;
  double power = 1.0;
  for (int i = 0; i < s.m; ++i) power *= k;
  return s.norm * power * std::exp(-0.5 * s.a0 * s.a0 * d * d) * std::polar(1.0, -k * s.x0);
}

Eigen::VectorXcd momentum_amplitude(const PacketSpec& spec,
                                    const Eigen::Ref<const Eigen::VectorXd>& ks) {
  Eigen::VectorXcd out(ks.size());
  for (Eigen::Index i = 0; i < ks.size(); ++i) out(i) = momentum_amplitude(spec, ks(i));
  return out;
}

std::vector<cplx> momentum_derivatives_at_zero(const PacketSpec& s, int nmax) {
  // exp(-a^2 (k-k0)^2/2 - i k x0) = exp(-a^2 k0^2/2) exp(alpha k + beta k^2 / 2)
  const cplx alpha(s.a0 * s.a0 * s.k0, -s.x0);
  const double beta = -s.a0 * s.a0;
  std::vector<cplx> c(std::max(nmax + 1, 2), 0.0);
  c[0] = 1.0;
  c[1] = alpha;
  for (int n = 2; n <= nmax; ++n) c[n] = (alpha * c[n - 1] + beta * c[n - 2]) / double(n);
  const double pre = s.norm * std::exp(-0.5 * s.a0 * s.a0 * s.k0 * s.k0);
  std::vector<cplx> out(nmax + 1, 0.0);
  for (int n = s.m; n <= nmax; ++n) out[n] = pre * c[n - s.m] * factorial(n);
  return out;
}

double truncation_tail_bound(const PacketSpec& s) {
  const double w = truncation_half_width(s);
  auto f = [&](double u) {
    return s.norm * std::pow(std::abs(s.k0) + u, s.m) * std::exp(-0.5 * s.a0 * s.a0 * u * u);
  };
  return 2.0 * inv_sqrt_2pi * integrate(f, w, w + 40.0 / s.a0, 1e-10).value;
}

Eigen::VectorXcd position_amplitude(const PacketSpec& spec,
                                    const Eigen::Ref<const Eigen::VectorXd>& xs) {
  const double w = truncation_half_width(spec);
  double spread = 0.0;
  for (Eigen::Index i = 0; i < xs.size(); ++i) spread = std::max(spread, std::abs(xs(i) - spec.x0));
  const int panels = static_cast<int>(std::ceil(2.0 * w * (spread + 1.0))) + 4;
  const GaussRule rule = gauss_legendre(16);
  const double h = 2.0 * w / panels;
  const double lo = spec.k0 - w;

  // phase exp(-i k x0) is folded into exp(i k (x - x0))
  PacketSpec centred = spec;
  centred.x0 = 0.0;
  Eigen::VectorXd ks(panels * rule.nodes.size());
  Eigen::VectorXcd wf(ks.size());
  for (int p = 0; p < panels; ++p) {
    for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
      const Eigen::Index n = p * rule.nodes.size() + j;
      ks(n) = lo + h * (p + 0.5 * (rule.nodes(j) + 1.0));
      wf(n) = 0.5 * h * rule.weights(j) * momentum_amplitude(centred, ks(n));
    }
  }
  Eigen::VectorXcd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double s = xs(i) - spec.x0;
    cplx sum{0.0, 0.0};
    for (Eigen::Index n = 0; n < ks.size(); ++n) sum += wf(n) * std::polar(1.0, ks(n) * s);
    out(i) = sum * inv_sqrt_2pi;
  }
  return out;
}

cplx position_amplitude_exact(const PacketSpec& spec, double x) {
  // Completing the square: the k-integral becomes a Gaussian moment about
  // the complex centre mu = k0 + i s / a^2.
  const double a = spec.a0;
  const double s = x - spec.x0;
  const cplx mu(spec.k0, s / (a * a));
  cplx moment{0.0, 0.0};
  for (int j = 0; j <= spec.m; j += 2)
    moment += binomial(spec.m, j) * std::pow(mu, spec.m - j) * double_factorial_odd(j) *
              std::pow(a, -j);
  const cplx env = std::exp(cplx(-0.5 * s * s / (a * a), spec.k0 * s));
  return spec.norm / a * env * moment;
}

Eigen::VectorXcd position_amplitude_exact(const PacketSpec& spec,
                                          const Eigen::Ref<const Eigen::VectorXd>& xs) {
  Eigen::VectorXcd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) out(i) = position_amplitude_exact(spec, xs(i));
  return out;
}

double support_violation(const PacketSpec& spec, const PotentialSpec& pot) {
  auto density = [&](double x) { return std::norm(position_amplitude_exact(spec, x)); };
  const double lo = -pot.range();
  const double width = 40.0 * spec.a0 + 2.0 * spec.m;
  if (spec.x0 > lo) {
    return integrate(density, lo, spec.x0, 1e-13).value +
           integrate(density, spec.x0, spec.x0 + width, 1e-13).value;
  }
  return integrate(density, lo, lo + width, 1e-13).value;
}

}  // namespace qtail
