#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtail/propagation.hpp"

#if defined(__SSE2__)
#include <immintrin.h>
#endif

namespace qtail {

double minimum_box_half_width(const PacketSpec& packet, double t) {
  const double k_max = std::abs(packet.k0) + truncation_half_width(packet);
  return std::abs(packet.x0) + k_max * t + 10.0 * packet.a0;
}

GridPropagator::GridPropagator(const PotentialSpec& pot, double half_width, double dx,
                               double dt, GridStencil stencil)
    : dx_(dx), dt_(dt) {
  if (!(dx > 0.0) || !(dt > 0.0) || !(half_width > dx))
    throw Error("GridPropagator: need dx > 0, dt > 0 and half_width > dx");
  const long cells = std::lround(2.0 * half_width / dx);
  const Eigen::Index n = cells - 1;
  xs_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) xs_(i) = -half_width + (i + 1) * dx;

  // Potential on nodes; a node on a discontinuity takes the mean value.
  Eigen::VectorXd v(n);
  const double eps = 1e-9 * dx;
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = 0.5 * (pot(xs_(i) - eps) + pot(xs_(i) + eps));

  if (stencil == GridStencil::Numerov) {
    m_off_ = 1.0 / 12.0;
    m_diag_ = 10.0 / 12.0;
  } else {
    m_off_ = 0.0;
    m_diag_ = 1.0;
  }
  const cplx it(0.0, 0.5 * dt);
  const double d_off = 1.0 / (dx * dx), d_diag = -2.0 / (dx * dx);

  // Implicit: M - i tau D + i tau M V ; explicit: M + i tau D - i tau M V
  Eigen::VectorXcd a_sub(n), a_diag(n), a_sup(n);
  rhs_sub_.resize(n);
  rhs_diag_.resize(n);
  rhs_sup_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double vl = i > 0 ? v(i - 1) : 0.0;
    const double vr = i + 1 < n ? v(i + 1) : 0.0;
    a_sub(i) = m_off_ - it * d_off + it * m_off_ * vl;
    a_diag(i) = m_diag_ - it * d_diag + it * m_diag_ * v(i);
    a_sup(i) = m_off_ - it * d_off + it * m_off_ * vr;
    rhs_sub_(i) = m_off_ + it * d_off - it * m_off_ * vl;
    rhs_diag_(i) = m_diag_ + it * d_diag - it * m_diag_ * v(i);
    rhs_sup_(i) = m_off_ + it * d_off - it * m_off_ * vr;
  }
  sub_ = a_sub;
  sup_ = a_sup;
  inv_pivot_.resize(n);
  cplx pivot = a_diag(0);
  inv_pivot_(0) = 1.0 / pivot;
  for (Eigen::Index i = 1; i < n; ++i) {
    pivot = a_diag(i) - a_sub(i) * a_sup(i - 1) * inv_pivot_(i - 1);
    inv_pivot_(i) = 1.0 / pivot;
  }
  lower_.resize(n);
  lower_(0) = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) lower_(i) = a_sub(i) * inv_pivot_(i - 1);
  work_.resize(n);
}

void GridPropagator::step(Eigen::VectorXcd& psi) const {
  const Eigen::Index n = psi.size();
  Eigen::VectorXcd& r = work_;
  r(0) = rhs_diag_(0) * psi(0) + rhs_sup_(0) * psi(1);
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    r(i) = rhs_sub_(i) * psi(i - 1) + rhs_diag_(i) * psi(i) + rhs_sup_(i) * psi(i + 1);
  r(n - 1) = rhs_sub_(n - 1) * psi(n - 2) + rhs_diag_(n - 1) * psi(n - 1);
  // forward elimination, then back substitution
  for (Eigen::Index i = 1; i < n; ++i) r(i) -= lower_(i) * r(i - 1);
  psi(n - 1) = r(n - 1) * inv_pivot_(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) psi(i) = (r(i) - sup_(i) * psi(i + 1)) * inv_pivot_(i);
}

void GridPropagator::advance(Eigen::VectorXcd& psi, long steps) const {
  if (psi.size() != xs_.size()) throw Error("GridPropagator: state size does not match grid");
#if defined(__SSE2__)
  // Far tails of the packet sit in the subnormal range; flush them to zero.
  const unsigned saved = _mm_getcsr();
  _mm_setcsr(saved | 0x8040);
#endif
  for (long s = 0; s < steps; ++s) step(psi);
#if defined(__SSE2__)
  _mm_setcsr(saved);
#endif
}

double GridPropagator::norm(const Eigen::VectorXcd& psi) const {
  return psi.squaredNorm() * dx_;
}

std::vector<WaveField> evolve_grid(const PotentialSpec& pot, const PacketSpec& packet,
                                   const GridOptions& opts, const std::vector<double>& times) {
  if (times.empty()) return {};
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0)
    throw Error("evolve_grid: times must be sorted and nonnegative");
  const double t_end = times.back();
  const double need = minimum_box_half_width(packet, t_end);
  double half_width = opts.half_width > 0.0 ? opts.half_width : need;
  if (half_width < need) {
    std::ostringstream os;
    os << "evolve_grid: box half-width " << half_width << " is below the required " << need
       << " for t = " << t_end;
    throw Error(os.str());
  }
  half_width = std::ceil(half_width / opts.dx - 1e-9) * opts.dx;

  std::string warning;
  const double k_max = std::abs(packet.k0) + truncation_half_width(packet);
  if (k_max * opts.dx > 0.5 || k_max * k_max * opts.dt > 0.5) {
    std::ostringstream os;
    os << "grid resolution is coarse for k_max = " << k_max << " (k dx = " << k_max * opts.dx
       << ", k^2 dt = " << k_max * k_max * opts.dt << ")";
    warning = os.str();
  }

  const GridPropagator prop(pot, half_width, opts.dx, opts.dt, opts.stencil);
  Eigen::VectorXcd psi = position_amplitude_exact(packet, prop.xs());
  std::vector<WaveField> out;
  long done = 0;
  for (double t : times) {
    const long target = std::lround(t / opts.dt);
    prop.advance(psi, target - done);
    done = target;
    WaveField f;
    f.xs = prop.xs();
    f.t = done * opts.dt;
    f.values = psi;
    f.method = FieldMethod::Grid;
    f.error_budget = std::abs(prop.norm(psi) - 1.0);
    f.warning = warning;
    f.nodes = static_cast<std::size_t>(prop.xs().size());
    out.push_back(std::move(f));
  }
  return out;
}

WaveField evolve_grid(const PotentialSpec& pot, const PacketSpec& packet,
                      const GridOptions& opts, double t) {
  return evolve_grid(pot, packet, opts, std::vector<double>{t}).front();
}

}  // namespace qtail
