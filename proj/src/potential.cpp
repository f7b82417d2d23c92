#include "qtail/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "qtail/calculus.hpp"

namespace qtail {

namespace {

constexpr cplx I{0.0, 1.0};

// (cos(qL), sin(qL)/q) as entire functions of q^2.
struct Propagator {
  cplx c;
  cplx s;
};

Propagator region_propagator(cplx q2, double length) {
  const cplx q = std::sqrt(q2);
  const cplx z = q * length;
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return {1.0 - z2 / 2.0 + z2 * z2 / 24.0, length * (1.0 - z2 / 6.0 + z2 * z2 / 120.0)};
  }
  return {std::cos(z), std::sin(z) / q};
}

StateValue propagate(const StateValue& in, cplx q2, double length) {
  const Propagator p = region_propagator(q2, length);
  return {p.c * in.value + p.s * in.slope, -q2 * p.s * in.value + p.c * in.slope};
}

Eigen::Matrix2cd region_matrix(cplx q2, double length) {
  const Propagator p = region_propagator(q2, length);
  Eigen::Matrix2cd m;
  m << p.c, p.s, -q2 * p.s, p.c;
  return m;
}

BranchAmplitudes free_amplitudes(Side branch) {
  if (branch == Side::Plus) return {1.0, 0.0, 1.0, 0.0};
  return {0.0, 1.0, 0.0, 1.0};
}

BranchAmplitudes square_closed_form(const PotentialSpec& pot, Side branch, cplx kappa) {
  const double range = pot.range();
  const double kb2 = pot.height();
  const cplx rho = std::sqrt(kb2 - kappa * kappa);
  const cplx z = 2.0 * rho * range;
  const cplx mix = (kappa * kappa - rho * rho) / (2.0 * I * kappa);
  const cplx phase = std::exp(-2.0 * I * kappa * range);
  cplx transmission;
  cplx reflection;
  if (std::abs(z) < 0.5) {
    const cplx c = std::cosh(z);
    cplx s;
    if (std::abs(rho) * range < 1e-4) {
      const cplx z2 = z * z;
      s = 2.0 * range * (1.0 + z2 / 6.0 + z2 * z2 / 120.0);
    } else {
      s = std::sinh(z) / rho;
    }
    const cplx den = c + mix * s;
    transmission = phase / den;
    reflection = kb2 / (2.0 * I * kappa) * s * transmission;
  } else {
    // Scaled by e = exp(-2 rho R) with |e| <= 1 so tall or wide barriers
    // do not overflow.
    const cplx e = std::exp(-z);
    const cplx c_scaled = 0.5 * (1.0 + e * e);
    const cplx s_scaled = (1.0 - e * e) / (2.0 * rho);
    const cplx den = c_scaled + mix * s_scaled;
    transmission = phase * e / den;
    reflection = kb2 / (2.0 * I * kappa) * s_scaled / den * phase;
  }
  if (branch == Side::Plus) return {1.0, reflection, transmission, 0.0};
  return {0.0, transmission, reflection, 1.0};
}

BranchAmplitudes transfer_matrix(const PotentialSpec& pot, Side branch, cplx kappa) {
  const double range = pot.range();
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  for (const auto& r : pot.regions())
    m = region_matrix(kappa * kappa - r.value, r.right - r.left) * m;

  const cplx em = std::exp(-I * kappa * range);
  const cplx ep = std::exp(I * kappa * range);
  const Eigen::Vector2cd u(em, I * kappa * em);   // e^{i kappa x} at -R
  const Eigen::Vector2cd v(ep, -I * kappa * ep);  // e^{-i kappa x} at -R
  const Eigen::Vector2cd w(ep, I * kappa * ep);   // e^{i kappa x} at +R
  const Eigen::Vector2cd y(em, -I * kappa * em);  // e^{-i kappa x} at +R

  Eigen::Matrix2cd a;
  a.col(0) = m * v;
  a.col(1) = -w;
  const Eigen::Vector2cd rhs = branch == Side::Plus ? Eigen::Vector2cd(-(m * u)) : y;

  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(a);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(1);
  const double condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(condition < 1e13)) {
    std::ostringstream os;
    os << "transfer-matrix system is near-singular at kappa = " << kappa
       << " (condition estimate " << condition << ")";
    throw ConditioningError(os.str(), condition);
  }
  const Eigen::Vector2cd sol = a.partialPivLu().solve(rhs);
  if (branch == Side::Plus) return {1.0, sol(0), sol(1), 0.0};
  return {0.0, sol(0), sol(1), 1.0};
}

}  // namespace

double PotentialSpec::barrier_momentum() const noexcept { return std::sqrt(height_); }

double PotentialSpec::operator()(double x) const noexcept {
  if (x < -range_ || x > range_) return 0.0;
  for (auto it = regions_.rbegin(); it != regions_.rend(); ++it)
    if (x >= it->left) return it->value;
  return 0.0;
}

PotentialSpec PotentialSpec::as_piecewise() const {
  PotentialSpec p = *this;
  p.kind_ = PotentialKind::PiecewiseConstant;
  return p;
}

PotentialSpec square_barrier(double v0, double range) {
  if (!(range > 0.0)) throw Error("square_barrier: range R must be positive");
  if (!(v0 >= 0.0)) throw Error("square_barrier: height V0 must be nonnegative (no bound states)");
  PotentialSpec p;
  p.kind_ = PotentialKind::SquareBarrier;
  p.range_ = range;
  p.height_ = v0;
  p.regions_ = {{-range, range, v0}};
  return p;
}

PotentialSpec piecewise_constant(double range, std::vector<Segment> segments) {
  if (!(range > 0.0)) throw Error("piecewise_constant: range R must be positive");
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.left < b.left; });
  PotentialSpec p;
  p.kind_ = PotentialKind::PiecewiseConstant;
  p.range_ = range;
  double cursor = -range;
  for (const auto& s : segments) {
    if (!(s.right > s.left)) throw Error("piecewise_constant: segment with nonpositive width");
    if (s.left < -range || s.right > range)
      throw Error("piecewise_constant: segment extends outside [-R, R]");
    if (s.left < cursor) throw Error("piecewise_constant: overlapping segments");
    if (!(s.value >= 0.0))
      throw Error("piecewise_constant: negative segment value (bound states excluded)");
    if (s.left > cursor) p.regions_.push_back({cursor, s.left, 0.0});
    p.regions_.push_back(s);
    p.height_ = std::max(p.height_, s.value);
    cursor = s.right;
  }
  if (cursor < range) p.regions_.push_back({cursor, range, 0.0});
  return p;
}

BranchAmplitudes branch_amplitudes(const PotentialSpec& pot, Side branch, cplx kappa,
                                   AmplitudeMethod method) {
  if (kappa == cplx{0.0, 0.0}) throw Error("branch_amplitudes: kappa = 0 is a limit, not a value");
  if (pot.is_free()) return free_amplitudes(branch);
  if (method == AmplitudeMethod::Auto)
    method = pot.kind() == PotentialKind::SquareBarrier ? AmplitudeMethod::ClosedForm
                                                         : AmplitudeMethod::TransferMatrix;
  if (method == AmplitudeMethod::ClosedForm) {
    if (pot.kind() != PotentialKind::SquareBarrier)
      throw Error("branch_amplitudes: closed form requires a square barrier");
    return square_closed_form(pot, branch, kappa);
  }
  return transfer_matrix(pot, branch, kappa);
}

ScatteringData amplitudes(const PotentialSpec& pot, double k, AmplitudeMethod method) {
  if (k == 0.0) throw Error("amplitudes: k = 0 is rejected; use the zero-momentum limits");
  const Side branch = k > 0 ? Side::Plus : Side::Minus;
  const BranchAmplitudes a = branch_amplitudes(pot, branch, std::abs(k), method);
  ScatteringData d;
  d.k = k;
  d.gPlus = a.gPlus;
  d.gMinus = a.gMinus;
  d.hPlus = a.hPlus;
  d.hMinus = a.hMinus;
  d.rho = std::sqrt(cplx(pot.height() - k * k, 0.0));
  return d;
}

StateValue branch_state_exterior(const BranchAmplitudes& amp, cplx kappa, double x) {
  const cplx a = x <= 0.0 ? amp.gPlus : amp.hPlus;
  const cplx b = x <= 0.0 ? amp.gMinus : amp.hMinus;
  const cplx ep = std::exp(I * kappa * x);
  const cplx em = std::exp(-I * kappa * x);
  return {a * ep + b * em, I * kappa * (a * ep - b * em)};
}

StateValue branch_state_interior(const PotentialSpec& pot, const BranchAmplitudes& amp,
                                 cplx kappa, double x) {
  const double range = pot.range();
  StateValue s = branch_state_exterior(amp, kappa, -range);
  const cplx k2 = kappa * kappa;
  if (x <= -range) return propagate(s, k2, x + range);
  for (const auto& r : pot.regions()) {
    if (x <= r.right) return propagate(s, k2 - r.value, x - r.left);
    s = propagate(s, k2 - r.value, r.right - r.left);
  }
  return propagate(s, k2, x - range);
}

StateValue branch_state(const PotentialSpec& pot, const BranchAmplitudes& amp, cplx kappa,
                        double x) {
  if (x < -pot.range() || x > pot.range()) return branch_state_exterior(amp, kappa, x);
  return branch_state_interior(pot, amp, kappa, x);
}

Eigen::VectorXcd scattering_state(const PotentialSpec& pot, double k,
                                  const Eigen::Ref<const Eigen::VectorXd>& xs) {
  if (k == 0.0) throw Error("scattering_state: k = 0 is rejected");
  const Side branch = k > 0 ? Side::Plus : Side::Minus;
  const double kappa = std::abs(k);
  const BranchAmplitudes amp = branch_amplitudes(pot, branch, kappa);
  Eigen::VectorXcd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i)
    out(i) = branch_state(pot, amp, kappa, xs(i)).value * inv_sqrt_2pi;
  return out;
}

cplx g_minus_derivative_at_zero(const PotentialSpec& pot, Side side, int order) {
  if (pot.kind() != PotentialKind::SquareBarrier)
    throw Error("g_minus_derivative_at_zero: closed forms exist only for the square barrier");
  if (pot.is_free())
    throw Error("g_minus_derivative_at_zero: V0 = 0 has different limits (free particle)");
  if (order < 0 || order > 1)
    throw Error("g_minus_derivative_at_zero: only orders 0 and 1 have closed forms");
  if (order == 0) return side == Side::Plus ? cplx{-1.0, 0.0} : cplx{0.0, 0.0};
  const double kb = pot.barrier_momentum();
  const double arg = 2.0 * kb * pot.range();
  const double inv_sinh = 1.0 / std::sinh(arg);
  if (side == Side::Plus) return 2.0 * I * pot.range() + 2.0 / (I * kb * std::tanh(arg));
  return -2.0 * inv_sinh / (I * kb);
}

double zero_contour_radius(const PotentialSpec& pot) {
  if (pot.is_free()) return 1.0;
  return 0.25 * std::min(pot.barrier_momentum(), 1.0 / pot.range());
}

BranchDerivatives branch_derivatives_at_zero(const PotentialSpec& pot, Side side, int nmax) {
  BranchDerivatives d;
  d.gPlus.assign(nmax + 1, 0.0);
  d.gMinus.assign(nmax + 1, 0.0);
  d.hPlus.assign(nmax + 1, 0.0);
  d.hMinus.assign(nmax + 1, 0.0);
  if (pot.is_free()) {
    const BranchAmplitudes f = free_amplitudes(side);
    d.gPlus[0] = f.gPlus;
    d.gMinus[0] = f.gMinus;
    d.hPlus[0] = f.hPlus;
    d.hMinus[0] = f.hMinus;
    return d;
  }
  constexpr int samples = 64;
  const double radius = zero_contour_radius(pot);
  std::vector<BranchAmplitudes> values(samples);
  for (int j = 0; j < samples; ++j)
    values[j] = branch_amplitudes(pot, side, std::polar(radius, 2.0 * pi * j / samples));
  const double sigma = sign_of(side);
  auto taylor = [&](auto member, int n) {
    cplx c{0.0, 0.0};
    for (int j = 0; j < samples; ++j)
      c += member(values[j]) * std::polar(1.0, -2.0 * pi * n * j / samples);
    // d/dk = sigma d/dkappa
    return c / static_cast<double>(samples) * factorial(n) / std::pow(radius, n) *
           std::pow(sigma, n);
  };
  for (int n = 0; n <= nmax; ++n) {
    d.gPlus[n] = taylor([](const BranchAmplitudes& a) { return a.gPlus; }, n);
    d.gMinus[n] = taylor([](const BranchAmplitudes& a) { return a.gMinus; }, n);
    d.hPlus[n] = taylor([](const BranchAmplitudes& a) { return a.hPlus; }, n);
    d.hMinus[n] = taylor([](const BranchAmplitudes& a) { return a.hMinus; }, n);
  }
  // The branch constants are exact.
  d.gPlus.assign(nmax + 1, 0.0);
  d.hMinus.assign(nmax + 1, 0.0);
  if (side == Side::Plus) d.gPlus[0] = 1.0; else d.hMinus[0] = 1.0;

  if (pot.kind() == PotentialKind::SquareBarrier) {
    // Closed forms for orders 0 and 1; the mirror symmetry of the barrier
    // maps the reflection of one branch onto the other.
    const cplx gm0 = g_minus_derivative_at_zero(pot, side, 0);
    d.gMinus[0] = gm0;
    if (nmax >= 1) d.gMinus[1] = g_minus_derivative_at_zero(pot, side, 1);
    const Side other = side == Side::Plus ? Side::Minus : Side::Plus;
    d.hPlus[0] = g_minus_derivative_at_zero(pot, other, 0);
    if (nmax >= 1) d.hPlus[1] = -g_minus_derivative_at_zero(pot, other, 1);
  }
  return d;
}

Eigen::MatrixXcd phi_derivatives_at_zero(const PotentialSpec& pot, Side side,
                                         const Eigen::Ref<const Eigen::VectorXd>& xs, int rmax) {
  Eigen::MatrixXcd out(xs.size(), rmax + 1);
  const BranchDerivatives bd = branch_derivatives_at_zero(pot, side, rmax);
  const double sigma = sign_of(side);
  const double range = pot.range();
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double x = xs(i);
    const bool left = x < -range;
    const bool right = x > range;
    if (left || right || pot.is_free()) {
      // sqrt(2 pi) phi = A(k) e^{ikx} + B(k) e^{-ikx} on this side.
      const std::vector<cplx>* a;
      const std::vector<cplx>* b;
      if (x <= 0.0) {
        a = side == Side::Plus ? &bd.gPlus : &bd.gMinus;
        b = side == Side::Plus ? &bd.gMinus : &bd.gPlus;
      } else {
        a = side == Side::Plus ? &bd.hPlus : &bd.hMinus;
        b = side == Side::Plus ? &bd.hMinus : &bd.hPlus;
      }
      for (int r = 0; r <= rmax; ++r) {
        cplx sum{0.0, 0.0};
        for (int l = 0; l <= r; ++l) {
          const double c = binomial(r, l);
          sum += c * ((*a)[r - l] * std::pow(I * x, l) + (*b)[r - l] * std::pow(-I * x, l));
        }
        out(i, r) = sum * inv_sqrt_2pi;
      }
    } else {
      const auto taylor = contour_derivatives(
          [&](cplx kappa) {
            return branch_state(pot, branch_amplitudes(pot, side, kappa), kappa, x).value;
          },
          0.0, zero_contour_radius(pot), rmax);
      for (int r = 0; r <= rmax; ++r) out(i, r) = taylor[r] * std::pow(sigma, r) * inv_sqrt_2pi;
    }
  }
  return out;
}

Eigen::VectorXcd dk_phi_at_zero(const PotentialSpec& pot, Side side,
                                const Eigen::Ref<const Eigen::VectorXd>& xs) {
  const Eigen::MatrixXcd d = phi_derivatives_at_zero(pot, side, xs, 1);
  if (!pot.is_free()) {
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      const double scale = std::max(1.0, std::abs(d(i, 1)));
      if (std::abs(d(i, 0)) > 1e-8 * scale) {
        std::ostringstream os;
        os << "phi(x, " << (side == Side::Plus ? "+0" : "-0") << ") = " << d(i, 0)
           << " at x = " << xs(i)
           << ": zero-energy resonance, outside the supported no-resonance case";
        throw ResonanceError(os.str());
      }
    }
  }
  return d.col(1);
}

}  // namespace qtail
