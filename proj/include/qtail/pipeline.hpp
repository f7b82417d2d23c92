#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qtail/asymptotics.hpp"
#include "qtail/config.hpp"
#include "qtail/observables.hpp"
#include "qtail/propagation.hpp"
#include "qtail/spectral.hpp"

namespace qtail {

enum class Status { Pass, Fail, Skip };

struct Criterion {
  std::string id;
  std::string name;
  Status status = Status::Skip;
  std::string detail;
};

struct AcceptanceReport {
  std::vector<Criterion> items;
  bool passed() const;
  /// One line per criterion: "AC1 PASS <name>: <detail>".
  std::string format() const;
};

struct GridComparison {
  double t = 0.0;
  double rel_l2 = 0.0;
  double norm_drift = 0.0;
};

struct PacketRun {
  int m = 0;
  PacketSpec packet;
  SpectralAmplitude spectral;
  DerivativeTable fd_table{};
  TailExpansion tail;  // on the interval samples followed by x*
  ProbabilitySeries series;
  ProbabilitySeries asymptote;
  std::vector<double> envelope;  // P of the interference-free envelope
  std::vector<cplx> psi_star;
  std::vector<cplx> asym_star;
  double max_budget = 0.0;
  int flagged = 0;
  bool fit_done = false;
  std::string fit_error;
  WindowChoice window;
  PowerLawFit fit;
  double crossover = 0.0;
  ProfileRegions profile;
  std::vector<GridComparison> grid;
  std::vector<WaveField> snapshots;
  double norm_hat = 0.0;
  double norm_x = 0.0;
  double norm_tilde = 0.0;
};

struct AmplitudeSummary {
  std::vector<double> ks;
  std::vector<ScatteringData> data;
  double unitarity_error = 0.0;
  double transfer_matrix_gap = 0.0;  // closed form vs transfer matrix
  cplx g_minus_plus0;   // amplitude at k = +1e-10
  cplx g_minus_minus0;  // amplitude at k = -1e-10
};

struct RunOptions {
  bool series = true;
  bool grid = true;
  bool snapshots = true;
  std::ostream* log = nullptr;
};

struct RunResult {
  ExperimentConfig config;
  PotentialSpec potential;
  AmplitudeSummary amplitudes;
  std::vector<PacketRun> packets;
};

AmplitudeSummary amplitude_summary(const PotentialSpec& pot);

/// Spectral data, tail expansion and norms for one packet (no time series).
PacketRun analyse_packet(const ExperimentConfig& cfg, const PotentialSpec& pot, int m);

/// P(t), psi(x*, t) and their asymptotes for every packet, sharing the
/// amplitude evaluations across packets.
void compute_series(const ExperimentConfig& cfg, const PotentialSpec& pot,
                    std::vector<PacketRun>& runs, std::ostream* log = nullptr);

/// Power-law fit (automatic or manual window), crossover and profile.
void analyse_series(const ExperimentConfig& cfg, PacketRun& run);

void compare_grid(const ExperimentConfig& cfg, const PotentialSpec& pot, PacketRun& run);

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

AcceptanceReport evaluate_acceptance(const RunResult& result);

/// amplitudes.csv, config.ini, plot.gp, acceptance.txt and a directory
/// m<order>/ per packet.
void write_artifacts(const RunResult& result, const std::string& dir,
                     const AcceptanceReport* report = nullptr);

void write_amplitudes(const AmplitudeSummary& amps, const std::string& path);
void write_series(const PacketRun& run, const std::string& dir);
void write_fit_report(const PacketRun& run, const std::string& path);

/// Reads t and P columns back from a nonescape.csv.
ProbabilitySeries read_series(const std::string& path);

struct ValidationRow {
  std::string name;
  Status status = Status::Skip;
  std::string detail;
};

/// Invariant suite without the long time series.
std::vector<ValidationRow> validate_invariants(const ExperimentConfig& cfg);

}  // namespace qtail
