#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtail/calculus.hpp"
#include "qtail/fourier_sum.hpp"
#include "qtail/propagation.hpp"
#include "qtail/quadrature.hpp"
#include "qtail/spectral.hpp"

namespace qtail {

namespace {

// Outward edges on [0, reach] for one half-line.
std::vector<double> half_line_edges(double reach, double t, double h_max, double phase,
                                    std::vector<double> stops) {
  stops.push_back(reach);
  std::sort(stops.begin(), stops.end());
  std::vector<double> edges{0.0};
  double e = 0.0;
  std::size_t next = 0;
  while (e < reach) {
    while (next < stops.size() && stops[next] <= e) ++next;
    double n = std::min(e + h_max, stops[next]);
    if (t > 0.0) n = std::min(n, std::sqrt(e * e + phase / t));
    if (stops[next] - n < 1e-9 * h_max) n = stops[next];
    edges.push_back(n);
    e = n;
  }
  return edges;
}

// Gauss-Legendre remainder for an integrand whose phase turns by theta over
// the panel: (n!)^4 / ((2n+1) ((2n)!)^3) theta^{2n}.
double gauss_remainder_factor(int n, double theta) {
  const double fn = factorial(n);
  const double f2n = factorial(2 * n);
  return fn * fn * fn * fn / ((2.0 * n + 1.0) * f2n * f2n * f2n) * std::pow(theta, 2 * n);
}

}  // namespace

std::vector<double> spectral_panels(double lo, double hi, double t, double h_max, double phase,
                                    double fine, const std::vector<double>& breakpoints) {
  if (!(lo <= 0.0 && hi >= 0.0)) throw Error("spectral_panels: window must contain k = 0");
  std::vector<double> pos_stops{fine}, neg_stops{fine};
  for (double b : breakpoints) {
    if (b > 0.0 && b < hi) pos_stops.push_back(b);
    if (b < 0.0 && b > lo) neg_stops.push_back(-b);
  }
  std::vector<double> edges;
  if (lo < 0.0) {
    const auto neg = half_line_edges(-lo, t, h_max, phase, neg_stops);
    for (auto it = neg.rbegin(); it != neg.rend(); ++it) edges.push_back(-*it);
    edges.pop_back();
  }
  const auto pos = half_line_edges(hi, t, h_max, phase, pos_stops);
  edges.insert(edges.end(), pos.begin(), pos.end());
  return edges;
}

std::vector<WaveField> evolve_spectral(const PotentialSpec& pot,
                                       const std::vector<PacketSpec>& packets,
                                       const Eigen::Ref<const Eigen::VectorXd>& xs, double t,
                                       const SpectralOptions& opts) {
  if (!(t >= 0.0)) throw Error("evolve_spectral: t must be nonnegative");
  if (packets.empty()) return {};
  const std::size_t np = packets.size();
  const double range = pot.range();

  double lo = 0.0, hi = 0.0, reach_x = 0.0, x0max = 0.0;
  for (const auto& p : packets) {
    const auto s = spectral_support(p);
    lo = std::min(lo, s[0]);
    hi = std::max(hi, s[1]);
    x0max = std::max(x0max, std::abs(p.x0));
  }
  for (Eigen::Index i = 0; i < xs.size(); ++i) reach_x = std::max(reach_x, std::abs(xs(i)));
  const double spread = x0max + reach_x + 2.0 * range;
  const double h_max = std::min(opts.max_panel, 1.0 / (spread + 1.0));
  std::vector<double> brk;
  if (!pot.is_free()) brk = {-pot.barrier_momentum(), pot.barrier_momentum()};
  const std::vector<double> edges =
      spectral_panels(lo, hi, t, h_max, opts.phase_per_panel, opts.fine_half_width, brk);

  std::vector<Eigen::Index> left, right, inner;
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    if (xs(i) < -range) left.push_back(i);
    else if (xs(i) > range) right.push_back(i);
    else inner.push_back(i);
  }
  auto gather = [&](const std::vector<Eigen::Index>& idx) {
    Eigen::VectorXd v(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) v(i) = xs(idx[i]);
    return v;
  };
  const Eigen::VectorXd xl = gather(left), xr = gather(right);
  std::vector<FourierSum> sum_left, sum_right;
  for (std::size_t p = 0; p < np; ++p) {
    sum_left.emplace_back(xl, 2);
    sum_right.emplace_back(xr, 2);
  }
  std::vector<Eigen::VectorXcd> sum_inner(np, Eigen::VectorXcd::Zero(inner.size()));
  std::vector<double> abs_mass(np, 0.0), gl_error(np, 0.0);

  const GaussRule rule = gauss_legendre(opts.order);
  const Eigen::Index nq = rule.nodes.size();
  std::size_t node_count = 0;
  std::vector<cplx> base(np);
  std::vector<double> panel_mass(np);
  std::vector<cplx> states(inner.size());

  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], b = edges[e + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const double theta = t * std::abs(b * b - a * a) + (b - a) * spread;
    std::fill(panel_mass.begin(), panel_mass.end(), 0.0);
    for (Eigen::Index j = 0; j < nq; ++j) {
      const double k = mid + half * rule.nodes(j);
      if (k == 0.0) continue;
      const double w = half * rule.weights(j);
      const double kappa = std::abs(k);
      const Side side = k > 0 ? Side::Plus : Side::Minus;
      const BranchAmplitudes amp = branch_amplitudes(pot, side, kappa);
      const double phase = -t * k * k;
      for (std::size_t p = 0; p < np; ++p) {
        base[p] = w * inv_sqrt_2pi * spectral_value(amp, packets[p], k);
        panel_mass[p] += std::abs(base[p]);
      }
      if (!left.empty()) {
        for (std::size_t p = 0; p < np; ++p) {
          if (side == Side::Plus) {
            sum_left[p].add_with_phase(0, k, phase, base[p] * amp.gPlus);
            sum_left[p].add_with_phase(1, -k, phase, base[p] * amp.gMinus);
          } else {
            sum_left[p].add_with_phase(0, k, phase, base[p] * amp.gMinus);
          }
        }
      }
      if (!right.empty()) {
        for (std::size_t p = 0; p < np; ++p) {
          if (side == Side::Plus) {
            sum_right[p].add_with_phase(0, k, phase, base[p] * amp.hPlus);
          } else {
            sum_right[p].add_with_phase(0, k, phase, base[p] * amp.hMinus);
            sum_right[p].add_with_phase(1, -k, phase, base[p] * amp.hPlus);
          }
        }
      }
      if (!inner.empty()) {
        const cplx rot = std::polar(1.0, phase);
        for (std::size_t i = 0; i < inner.size(); ++i)
          states[i] = rot * branch_state(pot, amp, kappa, xs(inner[i])).value;
        for (std::size_t p = 0; p < np; ++p)
          for (std::size_t i = 0; i < inner.size(); ++i) sum_inner[p](i) += base[p] * states[i];
      }
      ++node_count;
    }
    const double factor = gauss_remainder_factor(static_cast<int>(nq), theta);
    for (std::size_t p = 0; p < np; ++p) {
      abs_mass[p] += panel_mass[p];
      gl_error[p] += panel_mass[p] * factor;
    }
  }

  std::vector<WaveField> out(np);
  for (std::size_t p = 0; p < np; ++p) {
    WaveField& f = out[p];
    f.xs = xs;
    f.t = t;
    f.method = FieldMethod::Spectral;
    f.values.resize(xs.size());
    const Eigen::VectorXcd vl = sum_left[p].evaluate();
    const Eigen::VectorXcd vr = sum_right[p].evaluate();
    for (std::size_t i = 0; i < left.size(); ++i) f.values(left[i]) = vl(i);
    for (std::size_t i = 0; i < right.size(); ++i) f.values(right[i]) = vr(i);
    for (std::size_t i = 0; i < inner.size(); ++i) f.values(inner[i]) = sum_inner[p](i);
    // The amplitudes are bounded by 1 outside the potential, so the
    // truncation bound of psi_hat carries over to psi_tilde (up to factor 2).
    const double tail = 2.0 * truncation_tail_bound(packets[p]);
    const double roundoff = 64.0 * 2.2e-16 * abs_mass[p];
    f.error_budget = tail + gl_error[p] + roundoff;
    f.nodes = node_count;
    if (f.error_budget > opts.budget_tol) {
      f.flagged = true;
      std::ostringstream os;
      os << "quadrature error budget " << f.error_budget << " exceeds " << opts.budget_tol;
      f.warning = os.str();
    }
  }
  return out;
}

WaveField evolve_spectral(const PotentialSpec& pot, const PacketSpec& packet,
                          const Eigen::Ref<const Eigen::VectorXd>& xs, double t,
                          const SpectralOptions& opts) {
  return evolve_spectral(pot, std::vector<PacketSpec>{packet}, xs, t, opts).front();
}

Eigen::VectorXcd free_evolution_exact(const PacketSpec& packet,
                                      const Eigen::Ref<const Eigen::VectorXd>& xs, double t) {
  const double a2 = packet.a0 * packet.a0;
  const cplx A(0.5 * a2, t);
  const cplx root = std::sqrt(pi / A);
  Eigen::VectorXcd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double s = xs(i) - packet.x0;
    const cplx mu = cplx(a2 * packet.k0, s) / (2.0 * A);
    cplx moment{0.0, 0.0};
    for (int j = 0; j <= packet.m; j += 2) {
      double dfact = 1.0;
      for (int q = j - 1; q > 1; q -= 2) dfact *= q;
      moment += binomial(packet.m, j) * std::pow(mu, packet.m - j) * dfact *
                std::pow(2.0 * A, -0.5 * j);
    }
    const cplx expo = A * mu * mu - 0.5 * a2 * packet.k0 * packet.k0;
    out(i) = inv_sqrt_2pi * packet.norm * std::exp(expo) * root * moment;
  }
  return out;
}

}  // namespace qtail
