#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "qtail/types.hpp"

namespace qtail {

/// Constant value on [left, right].
struct Segment {
  double left = 0.0;
  double right = 0.0;
  double value = 0.0;
};

enum class PotentialKind { SquareBarrier, PiecewiseConstant };

/// Nonnegative potential that vanishes outside [-R, R].
///
/// Construct through square_barrier() or piecewise_constant(). The regions()
/// list always covers [-R, R] contiguously; gaps between user segments are
/// filled with zero-valued regions.
class PotentialSpec {
 public:
  PotentialKind kind() const noexcept { return kind_; }
  double range() const noexcept { return range_; }

  /// Barrier height V0 for a square barrier, max segment value otherwise.
  double height() const noexcept { return height_; }

  /// k_b = sqrt(V0).
  double barrier_momentum() const noexcept;

  bool is_free() const noexcept { return height_ == 0.0; }

  const std::vector<Segment>& regions() const noexcept { return regions_; }

  /// V(x). Points exactly on an internal edge take the right-hand value.
  double operator()(double x) const noexcept;

  /// Same potential described as a single-segment piecewise potential.
  PotentialSpec as_piecewise() const;

 private:
  friend PotentialSpec square_barrier(double v0, double range);
  friend PotentialSpec piecewise_constant(double range, std::vector<Segment> segments);

  PotentialKind kind_ = PotentialKind::SquareBarrier;
  double range_ = 1.0;
  double height_ = 0.0;
  std::vector<Segment> regions_;
};

/// Throws Error for range <= 0 or v0 < 0 (negative values may bind).
PotentialSpec square_barrier(double v0, double range);

/// Segments must lie inside [-range, range], must not overlap and must carry
/// nonnegative values.
PotentialSpec piecewise_constant(double range, std::vector<Segment> segments);

/// Exterior coefficients of one branch of stationary states, expressed in
/// kappa = |k| (continued analytically off the real axis):
///   x < -R:  sqrt(2 pi) phi = gPlus e^{i kappa x} + gMinus e^{-i kappa x}
///   x >  R:  sqrt(2 pi) phi = hPlus e^{i kappa x} + hMinus e^{-i kappa x}
/// The Plus branch (k > 0) has gPlus = 1, hMinus = 0; the Minus branch
/// (k < 0) has gPlus = 0, hMinus = 1.
struct BranchAmplitudes {
  cplx gPlus;
  cplx gMinus;
  cplx hPlus;
  cplx hMinus;
};

enum class AmplitudeMethod { Auto, ClosedForm, TransferMatrix };

/// Outgoing-wave exterior coefficients at complex kappa != 0. Closed form is
/// only available for square barriers; Auto picks it when possible.
BranchAmplitudes branch_amplitudes(const PotentialSpec& pot, Side branch, cplx kappa,
                                   AmplitudeMethod method = AmplitudeMethod::Auto);

/// Stationary scattering data at a real momentum k != 0.
///
/// gPlus/gMinus are the coefficients of e^{+-i|k|x} left of the potential.
/// hPlus/hMinus are the same on the right. For k > 0 gMinus is the
/// reflection amplitude and hPlus the transmission g(k); for k < 0 gMinus is
/// the transmission amplitude and hPlus the reflection amplitude.
struct ScatteringData {
  double k = 0.0;
  cplx gPlus;
  cplx gMinus;
  cplx hPlus;
  cplx hMinus;
  cplx rho;  // (k_b^2 - k^2)^{1/2}, Re >= 0

  cplx transmission() const noexcept { return k > 0 ? hPlus : gMinus; }
  cplx reflection() const noexcept { return k > 0 ? gMinus : hPlus; }
};

ScatteringData amplitudes(const PotentialSpec& pot, double k,
                          AmplitudeMethod method = AmplitudeMethod::Auto);

/// Value and x-derivative of sqrt(2 pi) phi at x for the branch at kappa,
/// using the exterior forms outside [-R, R] and regionwise propagation
/// from x = -R inside.
struct StateValue {
  cplx value;
  cplx slope;
};

StateValue branch_state(const PotentialSpec& pot, const BranchAmplitudes& amp, cplx kappa,
                        double x);

/// Evaluates the interior (propagated) solution even outside [-R, R]; used
/// to test continuity at the edges against the exterior forms.
StateValue branch_state_interior(const PotentialSpec& pot, const BranchAmplitudes& amp,
                                 cplx kappa, double x);

/// Exterior representation on the side of x (x <= 0 left, x > 0 right).
StateValue branch_state_exterior(const BranchAmplitudes& amp, cplx kappa, double x);

/// phi(x, k) at real k != 0.
Eigen::VectorXcd scattering_state(const PotentialSpec& pot, double k,
                                  const Eigen::Ref<const Eigen::VectorXd>& xs);

/// Closed-form one-sided limits of g_-(k) and its first derivative for a
/// square barrier with V0 > 0 (order 0 or 1).
cplx g_minus_derivative_at_zero(const PotentialSpec& pot, Side side, int order);

/// k-derivatives (orders 0..nmax) at k -> side*0 of the four exterior
/// coefficient functions, obtained from the analytic branch by a Cauchy
/// contour integral. Index [order].
struct BranchDerivatives {
  std::vector<cplx> gPlus;
  std::vector<cplx> gMinus;
  std::vector<cplx> hPlus;
  std::vector<cplx> hMinus;
};

BranchDerivatives branch_derivatives_at_zero(const PotentialSpec& pot, Side side, int nmax);

/// Radius of the contour used for zero-momentum Taylor data.
double zero_contour_radius(const PotentialSpec& pot);

/// k-derivatives d^r phi / dk^r (x, side*0) for r = 0..rmax at every x.
/// Returns a matrix with one row per x and one column per order.
Eigen::MatrixXcd phi_derivatives_at_zero(const PotentialSpec& pot, Side side,
                                         const Eigen::Ref<const Eigen::VectorXd>& xs, int rmax);

/// d phi / dk (x, side*0). Throws ResonanceError when phi(x, side*0) does not
/// vanish (relative tolerance 1e-8).
Eigen::VectorXcd dk_phi_at_zero(const PotentialSpec& pot, Side side,
                                const Eigen::Ref<const Eigen::VectorXd>& xs);

}  // namespace qtail
