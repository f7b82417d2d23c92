#pragma once

#include <string>
#include <vector>

#include "qtail/packets.hpp"
#include "qtail/potential.hpp"
#include "qtail/types.hpp"

namespace qtail {

/// Invalid configuration; field() names the offending "section.key".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// All quantities in units hbar = 1, 2M = 1. Defaults reproduce the reference barrier setup.
struct ExperimentConfig {
  // [potential]
  std::string potential_kind = "square";  // square | piecewise
  double v0 = 16.0;
  double range = 1.0;
  std::vector<Segment> segments;

  // [packet]
  std::vector<int> packets{0, 1, 2};
  double a0 = 1.0;
  double k0 = 1.0;
  double x0 = -20.0;

  // [interval]
  double a = -22.0;
  double b = -18.0;
  int points = 401;
  double x_star = -20.0;

  // [schedule]
  double t_min = 0.1;
  double t_max = 1.0e4;
  int per_decade = 20;
  bool include_zero = true;
  std::vector<double> times;  // explicit list overrides the log spacing

  // [spectral]
  int gauss_order = 8;
  double budget_tol = 1e-6;
  double max_panel = 0.05;

  // [grid]
  bool grid_enabled = true;
  double grid_dx = 0.01;
  double grid_dt = 1e-3;
  std::vector<double> grid_times{5.0, 10.0, 20.0};
  double grid_window_lo = -40.0;
  double grid_window_hi = 10.0;

  // [analysis]
  double vanishing_tol = 1e-8;
  double support_warning = 1e-8;
  double slope_band = 0.05;
  double fit_t1 = 0.0;  // manual window when both are positive
  double fit_t2 = 0.0;
  double crossover_fraction = 0.5;

  // [snapshots]
  std::vector<double> snapshot_times{0.0, 5.0, 10.0, 20.0};
  double snapshot_lo = -60.0;
  double snapshot_hi = 20.0;
  int snapshot_points = 801;

  // [acceptance]
  double slope3_tol = 0.15;
  double slope5_tol = 0.25;
  double ratio_band = 0.05;
  double oracle_tol = 1e-3;
  double unitarity_tol = 1e-12;
  double norm_tol = 1e-6;
  double grid_drift_tol = 1e-10;
  double zero_tol = 1e-8;
  double fd_tol = 1e-6;

  // [output]
  std::string output_dir = "qtail_out";
};

ExperimentConfig default_config();

/// Sectioned key = value text. Unknown sections or keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Throws ConfigError naming the first invalid field.
void validate_config(const ExperimentConfig& cfg);

/// Same layout parse_config accepts.
std::string to_ini(const ExperimentConfig& cfg);

/// Observation times: optional t = 0 followed by the explicit list or the
/// log-spaced schedule.
std::vector<double> schedule(const ExperimentConfig& cfg);

PotentialSpec make_potential(const ExperimentConfig& cfg);
PacketSpec make_packet(const ExperimentConfig& cfg, int m);

}  // namespace qtail
