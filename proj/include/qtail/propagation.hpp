#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "qtail/packets.hpp"
#include "qtail/potential.hpp"

namespace qtail {

enum class FieldMethod { Spectral, Grid };

struct WaveField {
  Eigen::VectorXd xs;
  double t = 0.0;
  Eigen::VectorXcd values;
  FieldMethod method = FieldMethod::Spectral;
  double error_budget = 0.0;
  bool flagged = false;
  std::string warning;
  std::size_t nodes = 0;  // quadrature nodes (spectral) or grid points (grid)
};

struct SpectralOptions {
  int order = 8;               // Gauss-Legendre points per panel
  double budget_tol = 1e-6;    // flag threshold on the error budget
  double max_panel = 0.05;     // upper bound on the panel width
  double phase_per_panel = pi / 4;  // bound on t * (k_right^2 - k_left^2)
  double fine_half_width = 1e-2;    // fixed panel edges at +-this value
};

/// Panel edges covering [lo, hi]. Panels grow outward from k = 0 and obey
/// width <= h_max and t*(e_{i+1}^2 - e_i^2) <= phase, with forced edges at 0,
/// +-fine and +-extra breakpoints.
std::vector<double> spectral_panels(double lo, double hi, double t, double h_max, double phase,
                                    double fine, const std::vector<double>& breakpoints);

/// psi(x, t) = \int exp(-i t k^2) phi(x, k) psi_tilde(k) dk.
WaveField evolve_spectral(const PotentialSpec& pot, const PacketSpec& packet,
                          const Eigen::Ref<const Eigen::VectorXd>& xs, double t,
                          const SpectralOptions& opts = {});

/// Several packets at once; amplitudes are evaluated once per node and
/// shared.
std::vector<WaveField> evolve_spectral(const PotentialSpec& pot,
                                       const std::vector<PacketSpec>& packets,
                                       const Eigen::Ref<const Eigen::VectorXd>& xs, double t,
                                       const SpectralOptions& opts = {});

/// Free-particle evolution of the packet family in closed form (Gaussian
/// moments about a complex centre).
Eigen::VectorXcd free_evolution_exact(const PacketSpec& packet,
                                      const Eigen::Ref<const Eigen::VectorXd>& xs, double t);

enum class GridStencil { Numerov, ThreePoint };

struct GridOptions {
  double half_width = 0.0;  // 0 selects minimum_box_half_width
  double dx = 0.01;
  double dt = 5e-4;
  GridStencil stencil = GridStencil::Numerov;
};

/// |x0| + k_max t + 10 a0 with k_max = |k0| + 8/a0.
double minimum_box_half_width(const PacketSpec& packet, double t);

/// Crank-Nicolson for i psi_t = -psi_xx + V psi on (-L, L) with Dirichlet
/// walls. The Numerov stencil replaces psi_xx by M^{-1} D with
/// M = tridiag(1, 10, 1)/12; the step is a Cayley transform of a real
/// symmetric operator, so it is unitary.
class GridPropagator {
 public:
  GridPropagator(const PotentialSpec& pot, double half_width, double dx, double dt,
                 GridStencil stencil = GridStencil::Numerov);

  const Eigen::VectorXd& xs() const noexcept { return xs_; }
  double dt() const noexcept { return dt_; }
  double dx() const noexcept { return dx_; }

  void step(Eigen::VectorXcd& psi) const;
  void advance(Eigen::VectorXcd& psi, long steps) const;

  /// sum |psi|^2 dx.
  double norm(const Eigen::VectorXcd& psi) const;

 private:
  Eigen::VectorXd xs_;
  double dx_;
  double dt_;
  double m_off_;
  double m_diag_;
  Eigen::VectorXcd rhs_sub_, rhs_diag_, rhs_sup_;
  // Thomas factorization of the implicit matrix.
  Eigen::VectorXcd sub_, lower_, inv_pivot_, sup_;
  mutable Eigen::VectorXcd work_;
};

/// Fields on the full grid at each requested time (sorted, >= 0).
std::vector<WaveField> evolve_grid(const PotentialSpec& pot, const PacketSpec& packet,
                                   const GridOptions& opts, const std::vector<double>& times);

WaveField evolve_grid(const PotentialSpec& pot, const PacketSpec& packet,
                      const GridOptions& opts, double t);

}  // namespace qtail
