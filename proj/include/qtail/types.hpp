#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace qtail {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934381868;

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// phi(x, +-0) does not vanish: the potential has a zero-energy resonance.
class ResonanceError : public Error {
 public:
  using Error::Error;
};

/// A 2x2 transfer-matrix system was too ill-conditioned to solve reliably.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Selects the one-sided limit k -> +0 (Plus) or k -> -0 (Minus).
enum class Side : int { Minus = -1, Plus = +1 };

inline constexpr int sign_of(Side s) noexcept { return static_cast<int>(s); }
inline constexpr int index_of(Side s) noexcept { return s == Side::Plus ? 0 : 1; }

}  // namespace qtail
