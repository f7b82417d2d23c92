#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qtail/config.hpp"
#include "qtail/csv.hpp"
#include "qtail/observables.hpp"
#include "qtail/pipeline.hpp"

namespace {

using namespace qtail;

int parse_packet(const std::string& s) {
  std::string v = s;
  if (v.rfind("m=", 0) == 0) v = v.substr(2);
  if (v != "0" && v != "1" && v != "2")
    throw ConfigError("packet", "--packet expects m=0, m=1 or m=2, got '" + s + "'");
  return std::stoi(v);
}

const char* status_text(Status s) {
  return s == Status::Pass ? "PASS" : s == Status::Fail ? "FAIL" : "SKIP";
}

int cmd_run(const ExperimentConfig& cfg, bool check) {
  RunOptions opts;
  opts.log = &std::cerr;
  const RunResult res = run_experiment(cfg, opts);
  for (const auto& r : res.packets) {
    std::cout << "m = " << r.m << ": ";
    if (r.fit_done)
      std::cout << "exponent " << r.fit.exponent << " +- " << r.fit.stderr_ << " on [" << r.fit.t1
                << ", " << r.fit.t2 << "]";
    else
      std::cout << "no fit (" << r.fit_error << ")";
    std::cout << ", crossover t = " << r.crossover << "\n";
    if (!r.spectral.warning.empty()) std::cerr << "warning: " << r.spectral.warning << "\n";
  }
  const AcceptanceReport rep = evaluate_acceptance(res);
  write_artifacts(res, cfg.output_dir, &rep);
  std::cout << "artifacts in " << cfg.output_dir << "\n";
  if (!check) return 0;
  std::cout << rep.format();
  return rep.passed() ? 0 : 2;
}

int cmd_validate(const ExperimentConfig& cfg) {
  bool ok = true;
  for (const auto& row : validate_invariants(cfg)) {
    std::printf("%-4s  %-58s %s\n", status_text(row.status), row.name.c_str(), row.detail.c_str());
    ok = ok && row.status != Status::Fail;
  }
  return ok ? 0 : 2;
}

int cmd_amplitudes(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  const AmplitudeSummary s = amplitude_summary(make_potential(cfg));
  write_amplitudes(s, cfg.output_dir + "/amplitudes.csv");
  std::cout << "unitarity error " << s.unitarity_error << ", g-(+0) " << s.g_minus_plus0.real()
            << (s.g_minus_plus0.imag() < 0 ? "" : "+") << s.g_minus_plus0.imag() << "i\n"
            << "wrote " << cfg.output_dir << "/amplitudes.csv\n";
  return 0;
}

int cmd_evolve(const ExperimentConfig& cfg) {
  RunOptions opts;
  opts.series = false;
  opts.grid = false;
  opts.log = &std::cerr;
  const RunResult res = run_experiment(cfg, opts);
  write_artifacts(res, cfg.output_dir, nullptr);
  std::cout << "wrote snapshots to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_tail(const ExperimentConfig& cfg) {
  RunOptions opts;
  opts.series = false;
  opts.grid = false;
  opts.snapshots = false;
  const RunResult res = run_experiment(cfg, opts);
  write_artifacts(res, cfg.output_dir, nullptr);
  for (const auto& r : res.packets) {
    std::cout << "m = " << r.m << ": vanishing order " << r.spectral.vanishing_order;
    if (r.tail.m >= 0) {
      std::cout << ", " << r.tail.classification << ", powers";
      for (const auto& t : r.tail.terms) std::cout << " t^-" << t.power;
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_fit(const ExperimentConfig& cfg) {
  for (int m : cfg.packets) {
    const std::string path = cfg.output_dir + "/m" + std::to_string(m) + "/nonescape.csv";
    ProbabilitySeries s = read_series(path);
    s.a = cfg.a;
    s.b = cfg.b;
    WindowChoice w{cfg.fit_t1, cfg.fit_t2, {}};
    if (!(cfg.fit_t1 > 0.0)) w = auto_fit_window(s, cfg.slope_band);
    const PowerLawFit f = fit_power_law(s, w.t1, w.t2);
    std::cout << "m = " << m << ": exponent " << f.exponent << " +- " << f.stderr_ << " on ["
              << f.t1 << ", " << f.t2 << "], r2 " << f.r2 << ", " << f.points << " points\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-time tails of wave packets scattered by a finite-range barrier"};
  app.require_subcommand(1);
  std::string config_path, packet, out;
  bool check = false;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--packet", packet, "restrict to one packet, m=<0|1|2>");
  app.add_option("--out", out, "output directory");
  app.add_flag("--check", check, "evaluate the acceptance criteria; exit 2 on failure");
  app.fallthrough();
  auto* run = app.add_subcommand("run", "full pipeline and artifacts");
  auto* validate = app.add_subcommand("validate", "invariant checks");
  auto* amps = app.add_subcommand("amplitudes", "scattering amplitude table");
  auto* evolve = app.add_subcommand("evolve", "wave function snapshots");
  auto* tail = app.add_subcommand("tail", "zero-momentum data and tail coefficients");
  auto* fit = app.add_subcommand("fit", "refit an existing nonescape.csv");
  for (auto* sub : {run, validate, amps, evolve, tail, fit}) sub->fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (!packet.empty()) cfg.packets = {parse_packet(packet)};
    if (!out.empty()) cfg.output_dir = out;
    validate_config(cfg);
    if (*run) return cmd_run(cfg, check);
    if (*validate) return cmd_validate(cfg);
    if (*amps) return cmd_amplitudes(cfg);
    if (*evolve) return cmd_evolve(cfg);
    if (*tail) return cmd_tail(cfg);
    return cmd_fit(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
