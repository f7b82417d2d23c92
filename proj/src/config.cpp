#include "qtail/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace qtail {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"potential", {"kind", "V0", "R", "segments"}},
      {"packet", {"m", "a0", "k0", "x0"}},
      {"interval", {"a", "b", "points", "x_star"}},
      {"schedule", {"t_min", "t_max", "per_decade", "include_zero", "times"}},
      {"spectral", {"order", "budget_tol", "max_panel"}},
      {"grid", {"enabled", "dx", "dt", "times", "window_lo", "window_hi"}},
      {"analysis",
       {"vanishing_tol", "support_warning", "slope_band", "fit_t1", "fit_t2",
        "crossover_fraction"}},
      {"snapshots", {"times", "x_min", "x_max", "points"}},
      {"acceptance",
       {"slope3_tol", "slope5_tol", "ratio_band", "oracle_tol", "unitarity_tol", "norm_tol",
        "grid_drift_tol", "zero_tol", "fd_tol"}},
      {"output", {"dir"}}};
  return keys;
}

double to_double(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  const std::string s = boost::trim_copy(text);
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  if (used != s.size()) throw ConfigError(field, "expected a number, got '" + text + "'");
  return v;
}

int to_int(const std::string& field, const std::string& text) {
  const double v = to_double(field, text);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError(field, "expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string& field, const std::string& text) {
  const std::string s = boost::to_lower_copy(boost::trim_copy(text));
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError(field, "expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text, const char* seps) {
  std::vector<std::string> parts;
  const std::string s = boost::trim_copy(text);
  if (s.empty()) return parts;
  boost::split(parts, s, boost::is_any_of(seps));
  for (auto& p : parts) boost::trim(p);
  return parts;
}

std::vector<double> to_doubles(const std::string& field, const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split_list(text, ",")) out.push_back(to_double(field, p));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

void require_increasing(const std::vector<double>& v, const std::string& field) {
  for (std::size_t i = 1; i < v.size(); ++i)
    require(v[i] > v[i - 1], field, "list must be strictly increasing");
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", std::string("parse error: ") + e.message() + " at line " +
                                    std::to_string(e.line()));
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError(section, "unknown section");
    for (const auto& [key, node] : body) {
      const std::string field = section + "." + key;
      if (!it->second.count(key)) throw ConfigError(field, "unknown key");
      const std::string v = node.get_value<std::string>();
      if (section == "potential") {
        if (key == "kind") {
          c.potential_kind = boost::to_lower_copy(boost::trim_copy(v));
        } else if (key == "V0") {
          c.v0 = to_double(field, v);
        } else if (key == "R") {
          c.range = to_double(field, v);
        } else {
          c.segments.clear();
          for (const auto& seg : split_list(v, ";")) {
            const auto parts = split_list(seg, ":");
            require(parts.size() == 3, field, "segments are 'left:right:value' separated by ';'");
            c.segments.push_back(
                {to_double(field, parts[0]), to_double(field, parts[1]), to_double(field, parts[2])});
          }
        }
      } else if (section == "packet") {
        if (key == "m") {
          c.packets.clear();
          for (const auto& p : split_list(v, ",")) c.packets.push_back(to_int(field, p));
        } else if (key == "a0") {
          c.a0 = to_double(field, v);
        } else if (key == "k0") {
          c.k0 = to_double(field, v);
        } else {
          c.x0 = to_double(field, v);
        }
      } else if (section == "interval") {
        if (key == "a") c.a = to_double(field, v);
        else if (key == "b") c.b = to_double(field, v);
        else if (key == "points") c.points = to_int(field, v);
        else c.x_star = to_double(field, v);
      } else if (section == "schedule") {
        if (key == "t_min") c.t_min = to_double(field, v);
        else if (key == "t_max") c.t_max = to_double(field, v);
        else if (key == "per_decade") c.per_decade = to_int(field, v);
        else if (key == "include_zero") c.include_zero = to_bool(field, v);
        else c.times = to_doubles(field, v);
      } else if (section == "spectral") {
        if (key == "order") c.gauss_order = to_int(field, v);
        else if (key == "budget_tol") c.budget_tol = to_double(field, v);
        else c.max_panel = to_double(field, v);
      } else if (section == "grid") {
        if (key == "enabled") c.grid_enabled = to_bool(field, v);
        else if (key == "dx") c.grid_dx = to_double(field, v);
        else if (key == "dt") c.grid_dt = to_double(field, v);
        else if (key == "times") c.grid_times = to_doubles(field, v);
        else if (key == "window_lo") c.grid_window_lo = to_double(field, v);
        else c.grid_window_hi = to_double(field, v);
      } else if (section == "analysis") {
        if (key == "vanishing_tol") c.vanishing_tol = to_double(field, v);
        else if (key == "support_warning") c.support_warning = to_double(field, v);
        else if (key == "slope_band") c.slope_band = to_double(field, v);
        else if (key == "fit_t1") c.fit_t1 = to_double(field, v);
        else if (key == "fit_t2") c.fit_t2 = to_double(field, v);
        else c.crossover_fraction = to_double(field, v);
      } else if (section == "snapshots") {
        if (key == "times") c.snapshot_times = to_doubles(field, v);
        else if (key == "x_min") c.snapshot_lo = to_double(field, v);
        else if (key == "x_max") c.snapshot_hi = to_double(field, v);
        else c.snapshot_points = to_int(field, v);
      } else if (section == "acceptance") {
        const double d = to_double(field, v);
        if (key == "slope3_tol") c.slope3_tol = d;
        else if (key == "slope5_tol") c.slope5_tol = d;
        else if (key == "ratio_band") c.ratio_band = d;
        else if (key == "oracle_tol") c.oracle_tol = d;
        else if (key == "unitarity_tol") c.unitarity_tol = d;
        else if (key == "norm_tol") c.norm_tol = d;
        else if (key == "grid_drift_tol") c.grid_drift_tol = d;
        else if (key == "zero_tol") c.zero_tol = d;
        else c.fd_tol = d;
      } else {
        c.output_dir = boost::trim_copy(v);
      }
    }
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& c) {
  require(c.potential_kind == "square" || c.potential_kind == "piecewise", "potential.kind",
          "must be 'square' or 'piecewise'");
  require(c.range > 0.0, "potential.R", "must be positive");
  if (c.potential_kind == "square") {
    require(c.v0 >= 0.0, "potential.V0", "must be nonnegative (bound states are excluded)");
  } else {
    require(!c.segments.empty(), "potential.segments", "piecewise potential needs segments");
    for (const auto& s : c.segments) {
      require(s.value >= 0.0, "potential.segments", "values must be nonnegative");
      require(s.left >= -c.range && s.right <= c.range && s.right > s.left, "potential.segments",
              "segments must be nonempty and inside [-R, R]");
    }
  }
  require(!c.packets.empty(), "packet.m", "at least one packet order is required");
  for (int m : c.packets) require(m >= 0 && m <= 2, "packet.m", "orders must be 0, 1 or 2");
  require(c.a0 > 0.0, "packet.a0", "must be positive");
  require(c.a < c.b, "interval.a", "must be below interval.b");
  require(c.points >= 200, "interval.points", "at least 200 samples are required");
  require(c.x_star >= c.a && c.x_star <= c.b, "interval.x_star", "must lie inside [a, b]");
  if (c.times.empty()) {
    require(c.t_min > 0.0, "schedule.t_min", "must be positive");
    require(c.t_max > c.t_min, "schedule.t_max", "must exceed schedule.t_min");
    require(c.per_decade >= 12, "schedule.per_decade", "at least 12 samples per decade");
  } else {
    require(c.times.front() > 0.0, "schedule.times", "times must be positive");
    require_increasing(c.times, "schedule.times");
  }
  require(c.gauss_order == 4 || c.gauss_order == 6 || c.gauss_order == 8 ||
              c.gauss_order == 10 || c.gauss_order == 12 || c.gauss_order == 16 ||
              c.gauss_order == 20,
          "spectral.order", "supported orders are 4, 6, 8, 10, 12, 16, 20");
  require(c.budget_tol > 0.0, "spectral.budget_tol", "must be positive");
  require(c.max_panel > 0.0, "spectral.max_panel", "must be positive");
  require(c.grid_dx > 0.0, "grid.dx", "must be positive");
  require(c.grid_dt > 0.0, "grid.dt", "must be positive");
  require_increasing(c.grid_times, "grid.times");
  for (double t : c.grid_times) require(t >= 0.0, "grid.times", "times must be nonnegative");
  require(c.grid_window_lo < c.grid_window_hi, "grid.window_lo", "must be below grid.window_hi");
  require(c.vanishing_tol > 0.0, "analysis.vanishing_tol", "must be positive");
  require(c.support_warning > 0.0, "analysis.support_warning", "must be positive");
  require(c.slope_band > 0.0, "analysis.slope_band", "must be positive");
  require(c.fit_t1 >= 0.0 && c.fit_t2 >= 0.0, "analysis.fit_t1", "must be nonnegative");
  require((c.fit_t1 > 0.0) == (c.fit_t2 > 0.0), "analysis.fit_t2",
          "set both fit_t1 and fit_t2 or neither");
  if (c.fit_t1 > 0.0) require(c.fit_t2 > c.fit_t1, "analysis.fit_t2", "must exceed fit_t1");
  require(c.crossover_fraction > 0.0, "analysis.crossover_fraction", "must be positive");
  require_increasing(c.snapshot_times, "snapshots.times");
  for (double t : c.snapshot_times) require(t >= 0.0, "snapshots.times", "times must be nonnegative");
  require(c.snapshot_lo < c.snapshot_hi, "snapshots.x_min", "must be below snapshots.x_max");
  require(c.snapshot_points >= 2, "snapshots.points", "at least 2 samples");
  const std::pair<double, const char*> tols[] = {
      {c.slope3_tol, "acceptance.slope3_tol"}, {c.slope5_tol, "acceptance.slope5_tol"},
      {c.ratio_band, "acceptance.ratio_band"}, {c.oracle_tol, "acceptance.oracle_tol"},
      {c.unitarity_tol, "acceptance.unitarity_tol"}, {c.norm_tol, "acceptance.norm_tol"},
      {c.grid_drift_tol, "acceptance.grid_drift_tol"}, {c.zero_tol, "acceptance.zero_tol"},
      {c.fd_tol, "acceptance.fd_tol"}};
  for (const auto& [v, name] : tols) require(v > 0.0, name, "tolerance must be positive");
  require(!c.output_dir.empty(), "output.dir", "must not be empty");
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[potential]\nkind = " << c.potential_kind << "\nV0 = " << c.v0 << "\nR = " << c.range
     << "\n";
  if (!c.segments.empty()) {
    os << "segments = ";
    for (std::size_t i = 0; i < c.segments.size(); ++i)
      os << (i ? "; " : "") << c.segments[i].left << ":" << c.segments[i].right << ":"
         << c.segments[i].value;
    os << "\n";
  }
  os << "\n[packet]\nm = ";
  for (std::size_t i = 0; i < c.packets.size(); ++i) os << (i ? ", " : "") << c.packets[i];
  os << "\na0 = " << c.a0 << "\nk0 = " << c.k0 << "\nx0 = " << c.x0 << "\n";
  os << "\n[interval]\na = " << c.a << "\nb = " << c.b << "\npoints = " << c.points
     << "\nx_star = " << c.x_star << "\n";
  os << "\n[schedule]\nt_min = " << c.t_min << "\nt_max = " << c.t_max
     << "\nper_decade = " << c.per_decade << "\ninclude_zero = " << (c.include_zero ? "true" : "false")
     << "\n";
  if (!c.times.empty()) os << "times = " << join(c.times) << "\n";
  os << "\n[spectral]\norder = " << c.gauss_order << "\nbudget_tol = " << c.budget_tol
     << "\nmax_panel = " << c.max_panel << "\n";
  os << "\n[grid]\nenabled = " << (c.grid_enabled ? "true" : "false") << "\ndx = " << c.grid_dx
     << "\ndt = " << c.grid_dt << "\ntimes = " << join(c.grid_times)
     << "\nwindow_lo = " << c.grid_window_lo << "\nwindow_hi = " << c.grid_window_hi << "\n";
  os << "\n[analysis]\nvanishing_tol = " << c.vanishing_tol
     << "\nsupport_warning = " << c.support_warning << "\nslope_band = " << c.slope_band
     << "\nfit_t1 = " << c.fit_t1 << "\nfit_t2 = " << c.fit_t2
     << "\ncrossover_fraction = " << c.crossover_fraction << "\n";
  os << "\n[snapshots]\ntimes = " << join(c.snapshot_times) << "\nx_min = " << c.snapshot_lo
     << "\nx_max = " << c.snapshot_hi << "\npoints = " << c.snapshot_points << "\n";
  os << "\n[acceptance]\nslope3_tol = " << c.slope3_tol << "\nslope5_tol = " << c.slope5_tol
     << "\nratio_band = " << c.ratio_band << "\noracle_tol = " << c.oracle_tol
     << "\nunitarity_tol = " << c.unitarity_tol << "\nnorm_tol = " << c.norm_tol
     << "\ngrid_drift_tol = " << c.grid_drift_tol << "\nzero_tol = " << c.zero_tol
     << "\nfd_tol = " << c.fd_tol << "\n";
  os << "\n[output]\ndir = " << c.output_dir << "\n";
  return os.str();
}

std::vector<double> schedule(const ExperimentConfig& c) {
  std::vector<double> out;
  if (c.include_zero) out.push_back(0.0);
  if (!c.times.empty()) {
    out.insert(out.end(), c.times.begin(), c.times.end());
    return out;
  }
  const double l0 = std::log10(c.t_min), l1 = std::log10(c.t_max);
  const int n = static_cast<int>(std::ceil((l1 - l0) * c.per_decade - 1e-9));
  for (int i = 0; i <= n; ++i) {
    // integer index keeps the sample set reproducible across platforms
    const double t = i == n ? c.t_max : std::pow(10.0, l0 + double(i) / c.per_decade);
    out.push_back(t);
  }
  return out;
}

PotentialSpec make_potential(const ExperimentConfig& c) {
  if (c.potential_kind == "square") return square_barrier(c.v0, c.range);
  return piecewise_constant(c.range, c.segments);
}

PacketSpec make_packet(const ExperimentConfig& c, int m) { return normalize(m, c.a0, c.k0, c.x0); }

}  // namespace qtail
