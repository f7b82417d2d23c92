#include "qtail/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "qtail/calculus.hpp"
#include "qtail/csv.hpp"
#include "qtail/quadrature.hpp"

namespace qtail {

namespace fs = std::filesystem;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

const char* status_text(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    default: return "SKIP";
  }
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Eigen::VectorXd interval_samples(const ExperimentConfig& c) {
  Eigen::VectorXd xs(c.points + 1);
  xs.head(c.points) = Eigen::VectorXd::LinSpaced(c.points, c.a, c.b);
  xs(c.points) = c.x_star;
  return xs;
}

double simpson_norm(const Eigen::VectorXd& xs, const Eigen::VectorXcd& v) {
  WaveField f;
  f.xs = xs;
  f.values = v;
  return nonescape(f, xs(0), xs(xs.size() - 1)).value;
}

SpectralOptions spectral_options(const ExperimentConfig& c) {
  SpectralOptions o;
  o.order = c.gauss_order;
  o.budget_tol = c.budget_tol;
  o.max_panel = c.max_panel;
  return o;
}

const PacketRun* find_run(const RunResult& r, int m) {
  for (const auto& p : r.packets)
    if (p.m == m) return &p;
  return nullptr;
}

double relative_gap(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

}  // namespace

bool AcceptanceReport::passed() const {
  for (const auto& c : items)
    if (c.status == Status::Fail) return false;
  return true;
}

std::string AcceptanceReport::format() const {
  std::ostringstream os;
  for (const auto& c : items)
    os << c.id << " " << status_text(c.status) << "  " << c.name << ": " << c.detail << "\n";
  return os.str();
}

AmplitudeSummary amplitude_summary(const PotentialSpec& pot) {
  AmplitudeSummary s;
  const double kb = pot.is_free() ? 1.0 : pot.barrier_momentum();
  const int n = 200;
  const double l0 = std::log10(1e-4 * kb), l1 = std::log10(10.0 * kb);
  std::vector<double> pos;
  for (int i = 0; i < n; ++i) pos.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (n - 1)));
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) s.ks.push_back(-*it);
  s.ks.insert(s.ks.end(), pos.begin(), pos.end());
  for (double k : s.ks) {
    const ScatteringData d = amplitudes(pot, k);
    s.data.push_back(d);
    s.unitarity_error = std::max(
        s.unitarity_error, std::abs(std::norm(d.transmission()) + std::norm(d.reflection()) - 1.0));
    if (pot.kind() == PotentialKind::SquareBarrier && !pot.is_free() && std::abs(k) >= 1e-3) {
      const ScatteringData t = amplitudes(pot, k, AmplitudeMethod::TransferMatrix);
      s.transfer_matrix_gap = std::max(
          {s.transfer_matrix_gap, std::abs(t.gMinus - d.gMinus), std::abs(t.hPlus - d.hPlus)});
    }
  }
  s.g_minus_plus0 = amplitudes(pot, 1e-10).gMinus;
  s.g_minus_minus0 = amplitudes(pot, -1e-10).gMinus;
  return s;
}

PacketRun analyse_packet(const ExperimentConfig& cfg, const PotentialSpec& pot, int m) {
  PacketRun r;
  r.m = m;
  r.packet = make_packet(cfg, m);
  r.spectral = build_spectral(pot, r.packet, cfg.vanishing_tol, cfg.support_warning);
  for (Side s : {Side::Plus, Side::Minus})
    for (int n = 0; n <= kMaxZeroOrder; ++n)
      r.fd_table[index_of(s)][n] = derivative_finite_difference(pot, r.packet, n, s);

  const Eigen::VectorXd xs = interval_samples(cfg);
  if (!pot.is_free()) {
    Eigen::VectorXd probe(1);
    probe << cfg.x_star;
    dk_phi_at_zero(pot, Side::Plus, probe);
    dk_phi_at_zero(pot, Side::Minus, probe);
  }
  if (r.spectral.vanishing_order <= kMaxTailOrder)
    r.tail = tail_expansion(pot, r.packet, xs, r.spectral.vanishing_order);

  const PacketSpec& p = r.packet;
  auto density = [&](double k) { return std::norm(momentum_amplitude(p, k)); };
  const double w = 12.0 / p.a0;
  const double lo = std::min(p.k0, 0.0) - w, hi = std::max(p.k0, 0.0) + w;
  for (int i = 0; i < 40; ++i)
    r.norm_hat += integrate(density, lo + (hi - lo) * i / 40, lo + (hi - lo) * (i + 1) / 40).value;
  const double reach = 12.0 * p.a0 + 2.0 * p.m;
  const Eigen::VectorXd xw = Eigen::VectorXd::LinSpaced(4001, p.x0 - reach, p.x0 + reach);
  r.norm_x = simpson_norm(xw, position_amplitude(p, xw));
  r.norm_tilde = spectral_norm(pot, p);
  return r;
}

void compute_series(const ExperimentConfig& cfg, const PotentialSpec& pot,
                    std::vector<PacketRun>& runs, std::ostream* log) {
  const std::vector<double> times = schedule(cfg);
  const Eigen::VectorXd xs = interval_samples(cfg);
  const Eigen::VectorXd xi = xs.head(cfg.points);
  std::vector<PacketSpec> packets;
  for (auto& r : runs) {
    packets.push_back(r.packet);
    r.series = ProbabilitySeries{cfg.a, cfg.b, {}, {}, {}, {}};
    r.asymptote = ProbabilitySeries{cfg.a, cfg.b, {}, {}, {}, {}};
    r.envelope.clear();
    r.psi_star.clear();
    r.asym_star.clear();
  }
  const SpectralOptions opts = spectral_options(cfg);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t it = 0; it < times.size(); ++it) {
    const double t = times[it];
    const std::vector<WaveField> fields = evolve_spectral(pot, packets, xs, t, opts);
    for (std::size_t p = 0; p < runs.size(); ++p) {
      PacketRun& r = runs[p];
      WaveField sub;
      sub.xs = xi;
      sub.values = fields[p].values.head(cfg.points);
      const Probability prob = nonescape(sub, cfg.a, cfg.b);
      r.series.times.push_back(t);
      r.series.values.push_back(prob.value);
      r.series.errors.push_back(prob.error + fields[p].error_budget);
      r.series.methods.push_back("spectral/" + prob.method);
      r.psi_star.push_back(fields[p].values(cfg.points));
      r.max_budget = std::max(r.max_budget, fields[p].error_budget);
      if (fields[p].flagged) ++r.flagged;

      r.asymptote.times.push_back(t);
      if (t > 0.0 && r.tail.m >= 0) {
        const Eigen::VectorXcd a = tail_values(r.tail, t);
        WaveField asym;
        asym.xs = xi;
        asym.values = a.head(cfg.points);
        const Probability pa = nonescape(asym, cfg.a, cfg.b);
        r.asymptote.values.push_back(pa.value);
        r.asymptote.errors.push_back(pa.error);
        r.asymptote.methods.push_back("asymptote/" + pa.method);
        r.asym_star.push_back(a(cfg.points));
        WaveField env;
        env.xs = xi;
        env.values.resize(cfg.points);
        for (int i = 0; i < cfg.points; ++i) env.values(i) = std::sqrt(tail_envelope(r.tail, i, t));
        r.envelope.push_back(nonescape(env, cfg.a, cfg.b).value);
      } else {
        r.asymptote.values.push_back(nan);
        r.asymptote.errors.push_back(nan);
        r.asymptote.methods.push_back("none");
        r.asym_star.push_back(cplx(nan, nan));
        r.envelope.push_back(nan);
      }
    }
    if (log && (it % 10 == 0 || it + 1 == times.size())) {
      const double el =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      *log << "  t = " << t << " (" << it + 1 << "/" << times.size() << ", "
           << fields.front().nodes << " nodes, " << num(el) << " s)\n";
    }
  }
}

void analyse_series(const ExperimentConfig& cfg, PacketRun& r) {
  r.fit_done = false;
  r.fit_error.clear();
  try {
    if (cfg.fit_t1 > 0.0) {
      r.window = WindowChoice{cfg.fit_t1, cfg.fit_t2, {}};
    } else {
      r.window = auto_fit_window(r.series, cfg.slope_band);
    }
    r.fit = fit_power_law(r.series, r.window.t1, r.window.t2);
    r.fit_done = true;
  } catch (const Error& e) {
    r.fit_error = e.what();
  }
  std::vector<double> ts;
  std::vector<cplx> s, a;
  for (std::size_t i = 0; i < r.series.times.size(); ++i) {
    if (r.series.times[i] <= 0.0 || std::isnan(r.asym_star[i].real())) continue;
    ts.push_back(r.series.times[i]);
    s.push_back(r.psi_star[i]);
    a.push_back(r.asym_star[i]);
  }
  r.crossover = ts.empty() ? std::numeric_limits<double>::infinity()
                           : crossover_time(ts, Eigen::Map<Eigen::VectorXcd>(s.data(), s.size()),
                                            Eigen::Map<Eigen::VectorXcd>(a.data(), a.size()),
                                            cfg.crossover_fraction);
  r.profile = three_region_profile(r.series);
}

void compare_grid(const ExperimentConfig& cfg, const PotentialSpec& pot, PacketRun& r) {
  r.grid.clear();
  if (cfg.grid_times.empty()) return;
  GridOptions go;
  go.dx = cfg.grid_dx;
  go.dt = cfg.grid_dt;
  const std::vector<WaveField> fields = evolve_grid(pot, r.packet, go, cfg.grid_times);
  for (const auto& g : fields) {
    std::vector<Eigen::Index> sel;
    for (Eigen::Index i = 0; i < g.xs.size(); ++i)
      if (g.xs(i) >= cfg.grid_window_lo - 1e-9 && g.xs(i) <= cfg.grid_window_hi + 1e-9)
        sel.push_back(i);
    Eigen::VectorXd xw(sel.size());
    Eigen::VectorXcd gv(sel.size());
    for (std::size_t j = 0; j < sel.size(); ++j) {
      xw(j) = g.xs(sel[j]);
      gv(j) = g.values(sel[j]);
    }
    const WaveField s = evolve_spectral(pot, r.packet, xw, g.t, spectral_options(cfg));
    r.grid.push_back({g.t, (s.values - gv).norm() / s.values.norm(), g.error_budget});
  }
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate_config(cfg);
  RunResult res{cfg, make_potential(cfg), {}, {}};
  std::ostream* log = opts.log;
  if (log) *log << "amplitudes\n";
  res.amplitudes = amplitude_summary(res.potential);
  for (int m : cfg.packets) {
    if (log) *log << "packet m = " << m << ": spectral data\n";
    res.packets.push_back(analyse_packet(cfg, res.potential, m));
    if (log && !res.packets.back().spectral.warning.empty())
      *log << "  warning: " << res.packets.back().spectral.warning << "\n";
  }
  if (opts.series) {
    if (log) *log << "time series (" << schedule(cfg).size() << " times)\n";
    compute_series(cfg, res.potential, res.packets, log);
    for (auto& r : res.packets) analyse_series(cfg, r);
  }
  if (opts.grid && cfg.grid_enabled) {
    for (auto& r : res.packets) {
      if (log) *log << "grid oracle m = " << r.m << "\n";
      compare_grid(cfg, res.potential, r);
    }
  }
  if (opts.snapshots && !cfg.snapshot_times.empty()) {
    if (log) *log << "snapshots\n";
    const Eigen::VectorXd xs =
        Eigen::VectorXd::LinSpaced(cfg.snapshot_points, cfg.snapshot_lo, cfg.snapshot_hi);
    std::vector<PacketSpec> packets;
    for (const auto& r : res.packets) packets.push_back(r.packet);
    for (double t : cfg.snapshot_times) {
      const auto fields = evolve_spectral(res.potential, packets, xs, t, spectral_options(cfg));
      for (std::size_t p = 0; p < fields.size(); ++p) res.packets[p].snapshots.push_back(fields[p]);
    }
  }
  return res;
}

AcceptanceReport evaluate_acceptance(const RunResult& res) {
  const ExperimentConfig& c = res.config;
  const bool free = res.potential.is_free();
  AcceptanceReport rep;

  auto slope = [&](const char* id, const char* name, std::vector<int> ms, double target,
                   double tol) {
    Criterion cr{id, name, Status::Skip, ""};
    if (free) {
      cr.detail = "free particle, no barrier tail";
      rep.items.push_back(cr);
      return;
    }
    std::ostringstream os;
    bool any = false, ok = true;
    for (int m : ms) {
      const PacketRun* r = find_run(res, m);
      if (!r || r->series.times.empty()) continue;
      any = true;
      if (!r->fit_done) {
        ok = false;
        os << "m" << m << ": " << r->fit_error << "; ";
        continue;
      }
      const bool pass = std::abs(r->fit.exponent - target) <= tol;
      ok = ok && pass;
      os << "m" << m << " exponent " << num(r->fit.exponent) << " +- " << num(r->fit.stderr_)
         << " on [" << num(r->fit.t1) << ", " << num(r->fit.t2) << "] (target " << target
         << " +- " << tol << "); ";
    }
    if (any) cr.status = ok ? Status::Pass : Status::Fail;
    cr.detail = any ? os.str() : "packet not in this run";
    rep.items.push_back(cr);
  };
  slope("AC1", "nonescape slope t^-3", {0, 1}, -3.0, c.slope3_tol);
  slope("AC2", "nonescape slope t^-5", {2}, -5.0, c.slope5_tol);

  {
    Criterion cr{"AC3", "asymptote agreement at x*", Status::Skip, ""};
    std::ostringstream os;
    bool any = false, ok = true;
    for (int m : {0, 2}) {
      const PacketRun* r = find_run(res, m);
      if (free || !r || r->series.times.empty()) continue;
      any = true;
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < r->series.times.size(); ++i) {
        const double t = r->series.times[i];
        if (!(t >= 10.0 * r->crossover) || t <= 0.0) continue;
        const double ratio = std::abs(r->psi_star[i]) / std::abs(r->asym_star[i]);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ++count;
      }
      const bool pass = count > 0 && lo >= 1.0 - c.ratio_band && hi <= 1.0 + c.ratio_band;
      ok = ok && pass;
      os << "m" << m << " crossover t = " << num(r->crossover);
      if (count > 0)
        os << ", ratio in [" << num(lo) << ", " << num(hi) << "] over " << count << " samples; ";
      else
        os << ", no samples past 10x crossover; ";
    }
    if (any) cr.status = ok ? Status::Pass : Status::Fail;
    cr.detail = any ? os.str() : "needs packets 0 or 2 with a barrier";
    rep.items.push_back(cr);
  }

  {
    Criterion cr{"AC4", "spectral vs grid oracle", Status::Skip, ""};
    std::ostringstream os;
    bool any = false, ok = true;
    for (const auto& r : res.packets) {
      if (r.grid.empty()) continue;
      any = true;
      double worst = 0.0;
      for (const auto& g : r.grid) worst = std::max(worst, g.rel_l2);
      ok = ok && worst < c.oracle_tol;
      os << "m" << r.m << " max rel L2 " << num(worst) << "; ";
    }
    if (any) {
      cr.status = ok ? Status::Pass : Status::Fail;
      os << "(tol " << c.oracle_tol << ")";
    }
    cr.detail = any ? os.str() : "grid oracle not run";
    rep.items.push_back(cr);
  }

  {
    Criterion cr{"AC5", "unitarity and normalization", Status::Pass, ""};
    std::ostringstream os;
    bool ok = res.amplitudes.unitarity_error <= c.unitarity_tol;
    os << "unitarity " << num(res.amplitudes.unitarity_error) << " over "
       << res.amplitudes.ks.size() << " momenta; ";
    double drift = 0.0, worst_norm = 0.0;
    for (const auto& r : res.packets) {
      for (double v : {r.norm_hat, r.norm_x, r.norm_tilde})
        worst_norm = std::max(worst_norm, std::abs(v - 1.0));
      for (const auto& g : r.grid) drift = std::max(drift, g.norm_drift);
    }
    ok = ok && worst_norm <= c.norm_tol;
    os << "max norm error " << num(worst_norm) << "; ";
    bool grid_any = false;
    for (const auto& r : res.packets) grid_any = grid_any || !r.grid.empty();
    if (grid_any) {
      ok = ok && drift < c.grid_drift_tol;
      os << "grid norm drift " << num(drift);
    } else {
      os << "grid norm drift not measured";
    }
    cr.status = ok ? Status::Pass : Status::Fail;
    cr.detail = os.str();
    rep.items.push_back(cr);
  }

  {
    Criterion cr{"AC6", "zero-momentum structure", Status::Skip, ""};
    if (free) {
      cr.detail = "free particle: zero-momentum limits are trivial";
    } else {
      std::ostringstream os;
      const double gp = std::abs(res.amplitudes.g_minus_plus0 + 1.0);
      const double gm = std::abs(res.amplitudes.g_minus_minus0);
      bool ok = gp <= c.zero_tol && gm <= c.zero_tol;
      os << "|g-(+0)+1| " << num(gp) << ", |g-(-0)| " << num(gm) << "; ";
      double zero = 0.0, fd = 0.0;
      for (const auto& r : res.packets) {
        for (int s = 0; s < 2; ++s) {
          zero = std::max(zero, std::abs(r.spectral.deriv_at_zero[s][0]));
          for (int n = 0; n <= 3; ++n)
            fd = std::max(fd, relative_gap(r.spectral.deriv_at_zero[s][n], r.fd_table[s][n]));
        }
        zero = std::max({zero, std::abs(spectral_value(res.potential, r.packet, 1e-10)),
                         std::abs(spectral_value(res.potential, r.packet, -1e-10))});
      }
      ok = ok && zero <= c.zero_tol && fd <= c.fd_tol;
      os << "max |psi~(+-0)| " << num(zero) << ", analytic vs finite difference " << num(fd)
         << " through order 3";
      if (const PacketRun* r = find_run(res, 2)) {
        double low = 0.0, third = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 2; ++s) {
          low = std::max({low, std::abs(r->spectral.deriv_at_zero[s][1]),
                          std::abs(r->spectral.deriv_at_zero[s][2])});
          third = std::min(third, std::abs(r->spectral.deriv_at_zero[s][3]));
        }
        ok = ok && low <= c.zero_tol && third > c.zero_tol && r->spectral.vanishing_order == 3;
        os << "; m2: max |psi~'|,|psi~''| " << num(low) << ", min |psi~'''| " << num(third)
           << ", vanishing order " << r->spectral.vanishing_order;
      }
      cr.status = ok ? Status::Pass : Status::Fail;
      cr.detail = os.str();
    }
    rep.items.push_back(cr);
  }

  {
    Criterion cr{"AC7", "three-region profile", Status::Skip, ""};
    std::ostringstream os;
    bool any = false, ok = true;
    for (const auto& r : res.packets) {
      if (r.series.times.empty()) continue;
      any = true;
      ok = ok && r.profile.found;
      os << "m" << r.m << ": " << r.profile.detail << "; ";
    }
    if (any) cr.status = ok ? Status::Pass : Status::Fail;
    cr.detail = any ? os.str() : "no time series";
    rep.items.push_back(cr);
  }
  return rep;
}

void write_amplitudes(const AmplitudeSummary& amps, const std::string& path) {
  CsvWriter w(path, {"k", "re_g_minus", "im_g_minus", "re_g", "im_g"});
  for (const auto& d : amps.data) {
    const cplx g = d.transmission();
    w.row(std::vector<double>{d.k, d.gMinus.real(), d.gMinus.imag(), g.real(), g.imag()});
  }
}

void write_series(const PacketRun& r, const std::string& dir) {
  {
    CsvWriter w(dir + "/nonescape.csv", {"t", "P", "method", "error"});
    for (std::size_t i = 0; i < r.series.times.size(); ++i)
      w.row(std::vector<std::string>{format_double(r.series.times[i]),
                                     format_double(r.series.values[i]), r.series.methods[i],
                                     format_double(r.series.errors[i])});
  }
  CsvWriter w(dir + "/asymptote.csv", {"t", "abs2_psi_asym_xstar", "P_asym", "P_envelope",
                                       "abs2_psi_xstar", "ratio_xstar"});
  for (std::size_t i = 0; i < r.asymptote.times.size(); ++i) {
    if (std::isnan(r.asymptote.values[i])) continue;
    const double a = std::abs(r.asym_star[i]);
    const double s = std::abs(r.psi_star[i]);
    w.row(std::vector<double>{r.asymptote.times[i], a * a, r.asymptote.values[i], r.envelope[i],
                              s * s, s / a});
  }
}

void write_fit_report(const PacketRun& r, const std::string& path) {
  std::ofstream os(path);
  os.precision(10);
  os << "packet m = " << r.m << "\n";
  os << "vanishing order = " << r.spectral.vanishing_order << "\n";
  if (r.tail.m >= 0) os << "tail classification = " << r.tail.classification << "\n";
  if (r.fit_done) {
    os << "exponent = " << r.fit.exponent << "\n";
    os << "stderr = " << r.fit.stderr_ << "\n";
    os << "window = [" << r.fit.t1 << ", " << r.fit.t2 << "]\n";
    os << "r2 = " << r.fit.r2 << "\n";
    os << "points = " << r.fit.points << "\n";
    os << "prefactor = " << r.fit.prefactor << "\n";
    if (!r.window.local_slopes.empty()) {
      os << "quarter-decade slopes =";
      for (double s : r.window.local_slopes) os << " " << s;
      os << "\n";
    }
  } else {
    os << "fit failed: " << r.fit_error << "\n";
  }
  os << "crossover t = " << r.crossover << "\n";
  os << "profile = " << (r.profile.found ? "three regions" : "not found") << " (" << r.profile.detail
     << ")\n";
  os << "max spectral error budget = " << r.max_budget << " (" << r.flagged << " flagged)\n";
}

ProbabilitySeries read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  ProbabilitySeries s;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string t, p, method, err;
    std::getline(ss, t, ',');
    std::getline(ss, p, ',');
    std::getline(ss, method, ',');
    std::getline(ss, err, ',');
    s.times.push_back(std::stod(t));
    s.values.push_back(std::stod(p));
    s.methods.push_back(method);
    s.errors.push_back(err.empty() ? 0.0 : std::stod(err));
  }
  return s;
}

void write_artifacts(const RunResult& res, const std::string& dir,
                     const AcceptanceReport* report) {
  fs::create_directories(dir);
  {
    std::ofstream(dir + "/config.ini") << to_ini(res.config);
  }
  write_amplitudes(res.amplitudes, dir + "/amplitudes.csv");
  if (report) std::ofstream(dir + "/acceptance.txt") << report->format();

  for (const auto& r : res.packets) {
    const std::string pd = dir + "/m" + std::to_string(r.m);
    fs::create_directories(pd);
    {
      CsvWriter w(pd + "/packet.csv", {"k", "re_psi_hat", "im_psi_hat"});
      for (Eigen::Index i = 0; i < r.spectral.ks.size(); ++i) {
        const cplx v = momentum_amplitude(r.packet, r.spectral.ks(i));
        w.row(std::vector<double>{r.spectral.ks(i), v.real(), v.imag()});
      }
    }
    {
      const double reach = 10.0 * r.packet.a0 + 2.0 * r.m;
      const Eigen::VectorXd xs =
          Eigen::VectorXd::LinSpaced(801, r.packet.x0 - reach, r.packet.x0 + reach);
      const Eigen::VectorXcd v = position_amplitude(r.packet, xs);
      CsvWriter w(pd + "/packet_position.csv", {"x", "re_psi", "im_psi"});
      for (Eigen::Index i = 0; i < xs.size(); ++i)
        w.row(std::vector<double>{xs(i), v(i).real(), v(i).imag()});
    }
    {
      CsvWriter w(pd + "/spectral.csv", {"k", "re_psi_tilde", "im_psi_tilde"});
      for (Eigen::Index i = 0; i < r.spectral.ks.size(); ++i)
        w.row(std::vector<double>{r.spectral.ks(i), r.spectral.values(i).real(),
                                  r.spectral.values(i).imag()});
    }
    {
      CsvWriter w(pd + "/derivatives.csv", {"sigma", "n", "re", "im", "method"});
      for (int s = 0; s < 2; ++s)
        for (int n = 0; n <= kMaxZeroOrder; ++n) {
          const std::string sg = s == 0 ? "+1" : "-1";
          const cplx a = r.spectral.deriv_at_zero[s][n], f = r.fd_table[s][n];
          w.row(std::vector<std::string>{sg, std::to_string(n), format_double(a.real()),
                                         format_double(a.imag()), "analytic"});
          w.row(std::vector<std::string>{sg, std::to_string(n), format_double(f.real()),
                                         format_double(f.imag()), "finite-difference"});
        }
    }
    if (r.tail.m >= 0) {
      CsvWriter w(pd + "/tail_coefficients.csv", {"x", "power", "re_c", "im_c"});
      for (const auto& term : r.tail.terms)
        for (Eigen::Index i = 0; i + 1 < r.tail.xs.size(); ++i)
          w.row(std::vector<double>{r.tail.xs(i), term.power, term.coefficient(i).real(),
                                    term.coefficient(i).imag()});
    }
    if (!r.series.times.empty()) {
      write_series(r, pd);
      write_fit_report(r, pd + "/fit_report.txt");
    }
    if (!r.grid.empty()) {
      CsvWriter w(pd + "/grid_oracle.csv", {"t", "rel_l2", "norm_drift"});
      for (const auto& g : r.grid) w.row(std::vector<double>{g.t, g.rel_l2, g.norm_drift});
    }
    for (const auto& f : r.snapshots) {
      CsvWriter w(pd + "/field_t" + time_tag(f.t) + ".csv", {"x", "t", "re_psi", "im_psi", "abs2_psi"});
      for (Eigen::Index i = 0; i < f.xs.size(); ++i)
        w.row(std::vector<double>{f.xs(i), f.t, f.values(i).real(), f.values(i).imag(),
                                  std::norm(f.values(i))});
    }
  }

  std::ofstream gp(dir + "/plot.gp");
  gp << "# P(t) against the predicted asymptotes; run with: gnuplot plot.gp\n"
     << "set terminal pngcairo size 900,650\nset output 'nonescape.png'\n"
     << "set datafile separator ','\nset logscale xy\nset format y '10^{%L}'\n"
     << "set xlabel 't'\nset ylabel 'P(t)'\nset yrange [1e-16:2]\nset key bottom left\n";
  gp << "plot ";
  bool first = true;
  for (const auto& r : res.packets) {
    if (r.series.times.empty()) continue;
    const std::string m = std::to_string(r.m);
    gp << (first ? "" : ", \\\n     ") << "'m" << m << "/nonescape.csv' every ::1 using 1:2 with lines lw 2 title 'm = "
       << m << "', \\\n     'm" << m << "/asymptote.csv' every ::1 using 1:3 with lines dt 2 title 'm = "
       << m << " asymptote', \\\n     'm" << m
       << "/asymptote.csv' every ::1 using 1:4 with lines dt 3 title 'm = " << m << " envelope'";
    first = false;
  }
  gp << "\n";
}

std::vector<ValidationRow> validate_invariants(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<ValidationRow> rows;
  const PotentialSpec pot = make_potential(cfg);
  const bool free = pot.is_free();
  auto add = [&](const std::string& name, bool ok, const std::string& detail) {
    rows.push_back({name, ok ? Status::Pass : Status::Fail, detail});
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    rows.push_back({name, Status::Skip, why});
  };

  const AmplitudeSummary amps = amplitude_summary(pot);
  if (free) {
    skip("flux unitarity", "free particle");
    skip("closed form vs transfer matrix", "free particle");
    skip("zero-momentum reflection limits", "free particle");
  } else {
    add("flux unitarity", amps.unitarity_error <= cfg.unitarity_tol,
        num(amps.unitarity_error) + " over " + std::to_string(amps.ks.size()) + " momenta");
    if (pot.kind() == PotentialKind::SquareBarrier)
      add("closed form vs transfer matrix", amps.transfer_matrix_gap <= 1e-12,
          num(amps.transfer_matrix_gap));
    else
      skip("closed form vs transfer matrix", "no closed form for this potential");
    const double gp = std::abs(amps.g_minus_plus0 + 1.0), gm = std::abs(amps.g_minus_minus0);
    add("zero-momentum reflection limits", gp <= cfg.zero_tol && gm <= cfg.zero_tol,
        "|g-(+0)+1| = " + num(gp) + ", |g-(-0)| = " + num(gm));
  }

  for (int m : cfg.packets) {
    const std::string tag = " (m = " + std::to_string(m) + ")";
    PacketRun r;
    try {
      r = analyse_packet(cfg, pot, m);
    } catch (const Error& e) {
      add("packet analysis" + tag, false, e.what());
      continue;
    }
    const double worst = std::max({std::abs(r.norm_hat - 1), std::abs(r.norm_x - 1)});
    add("Parseval" + tag, worst <= cfg.norm_tol,
        "|psi^|^2 " + num(r.norm_hat) + ", |psi|^2 " + num(r.norm_x));
    add("spectral completeness" + tag, std::abs(r.norm_tilde - 1) <= cfg.norm_tol,
        "|psi~|^2 = " + num(r.norm_tilde));
    if (free) {
      skip("closed form vs direct overlap" + tag, "free particle");
    } else {
      double gap = 0.0;
      for (double k : {0.5, -0.5, 1.5})
        gap = std::max(gap, std::abs(spectral_value(pot, r.packet, k) -
                                     spectral_value_direct(pot, r.packet, k)));
      add("closed form vs direct overlap" + tag, gap <= 1e-6, num(gap));
    }
    double fd = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int n = 0; n <= 3; ++n)
        fd = std::max(fd, relative_gap(r.spectral.deriv_at_zero[s][n], r.fd_table[s][n]));
    add("zero-momentum derivatives vs finite differences" + tag, fd <= cfg.fd_tol, num(fd));
    add("vanishing order" + tag, r.spectral.vanishing_order >= 0,
        "m = " + std::to_string(r.spectral.vanishing_order));
    if (r.tail.m >= 0) {
      const auto ex = explicit_leading_terms(pot, r.packet, r.tail.xs, r.tail.m);
      double gap = 0.0, scale = 0.0;
      for (std::size_t j = 0; j < ex.size(); ++j) {
        gap = std::max(gap, (ex[j].coefficient - r.tail.terms[j].coefficient).cwiseAbs().maxCoeff());
        scale = std::max(scale, r.tail.terms[j].coefficient.cwiseAbs().maxCoeff());
      }
      add("tail coefficient routes" + tag, gap <= 1e-10 * std::max(1.0, scale), num(gap));
    } else {
      skip("tail coefficient routes" + tag, "vanishing order above 3");
    }

    // free-evolution oracle
    const PotentialSpec none = square_barrier(0.0, cfg.range);
    const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(401, cfg.x0 - 20.0, cfg.x0 + 40.0);
    const WaveField f = evolve_spectral(none, r.packet, xs, 5.0);
    const double gap = (f.values - free_evolution_exact(r.packet, xs, 5.0)).cwiseAbs().maxCoeff();
    add("free evolution oracle t = 5" + tag, gap <= 1e-8, num(gap));

    GridOptions go;
    go.dx = cfg.grid_dx;
    go.dt = cfg.grid_dt;
    const WaveField g = evolve_grid(pot, r.packet, go, 1.0);
    add("grid norm conservation t = 1" + tag, g.error_budget < cfg.grid_drift_tol,
        num(g.error_budget));
  }
  return rows;
}

}  // namespace qtail
