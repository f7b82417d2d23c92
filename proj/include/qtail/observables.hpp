#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "qtail/propagation.hpp"

namespace qtail {

struct Probability {
  double value = 0.0;
  double error = 0.0;
  std::string method;
};

/// \int_a^b |psi|^2 dx from the field samples. Uniform samples use Simpson's
/// rule with one Richardson step (error |S_h - S_2h| / 15); other layouts
/// use the trapezoid rule with a halving estimate.
Probability nonescape(const WaveField& field, double a, double b);

struct ProbabilitySeries {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> errors;
  std::vector<std::string> methods;
};

struct PowerLawFit {
  double exponent = 0.0;
  double stderr_ = 0.0;
  double r2 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double prefactor = 0.0;
  int points = 0;
};

/// Least-squares slope of log P against log t over samples with t1 <= t <= t2.
PowerLawFit fit_power_law(const ProbabilitySeries& series, double t1, double t2);

struct WindowChoice {
  double t1 = 0.0;
  double t2 = 0.0;
  std::vector<double> local_slopes;
};

/// Latest window [t, 10 t] inside the series whose four quarter-decade
/// sub-fits have slopes within +-band of their mean.
WindowChoice auto_fit_window(const ProbabilitySeries& series, double band = 0.05);

/// Earliest sample time after which |s - a| <= fraction * |a| holds for every
/// later sample. Returns +inf when the last sample fails.
double crossover_time(const std::vector<double>& times, const Eigen::VectorXcd& exact,
                      const Eigen::VectorXcd& asymptote, double fraction = 0.5);

struct ProfileRegions {
  bool found = false;
  double first_minimum = 0.0;   // end of the initial decrease
  double revival_peak = 0.0;    // highest later maximum
  double decay_from = 0.0;      // last local maximum; monotone after it
  std::string detail;
};

/// Initial decrease, partial revival and monotone final decay, read off the
/// sign changes of dP/dt. Differences below rel_noise * P are treated as
/// flat.
ProfileRegions three_region_profile(const ProbabilitySeries& series, double rel_noise = 1e-9);

}  // namespace qtail
