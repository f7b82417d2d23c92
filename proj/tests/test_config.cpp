#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qtail/config.hpp"
#include "qtail/csv.hpp"
#include "qtail/pipeline.hpp"

using namespace qtail;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults encode the reference parameter set") {
  const ExperimentConfig c = default_config();
  CHECK(c.v0 == 16.0);
  CHECK(c.range == 1.0);
  CHECK(c.a0 == 1.0);
  CHECK(c.k0 == 1.0);
  CHECK(c.x0 == -20.0);
  CHECK(c.a == -22.0);
  CHECK(c.b == -18.0);
  CHECK(c.packets == std::vector<int>{0, 1, 2});
  // mean energy <k^2> = k0^2 + 1/(2 a0^2) of phi0 stays below V0
  CHECK(c.k0 * c.k0 + 0.5 / (c.a0 * c.a0) < c.v0);
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("schedule is strictly increasing and log-spaced") {
  const ExperimentConfig c = default_config();
  const auto ts = schedule(c);
  REQUIRE(ts.size() == 102);
  CHECK(ts.front() == 0.0);
  CHECK(ts[1] == doctest::Approx(0.1));
  CHECK(ts.back() == doctest::Approx(1e4));
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] > ts[i - 1]);
  ExperimentConfig e = c;
  e.times = {1.0, 5.0, 7.0};
  e.include_zero = false;
  CHECK(schedule(e) == std::vector<double>{1.0, 5.0, 7.0});
}

TEST_CASE("INI round trip") {
  ExperimentConfig c = default_config();
  c.v0 = 9.0;
  c.packets = {2};
  c.grid_times = {1.0, 2.0};
  c.output_dir = "elsewhere";
  const ExperimentConfig d = parse_config(to_ini(c));
  CHECK(d.v0 == 9.0);
  CHECK(d.packets == std::vector<int>{2});
  CHECK(d.grid_times == std::vector<double>{1.0, 2.0});
  CHECK(d.output_dir == "elsewhere");
  CHECK(to_ini(d) == to_ini(c));
}

TEST_CASE("field-level validation errors") {
  CHECK(field_of("[potential]\nV0 = -1\n") == "potential.V0");
  CHECK(field_of("[potential]\nR = 0\n") == "potential.R");
  CHECK(field_of("[potential]\nwidth = 2\n") == "potential.width");
  CHECK(field_of("[nonsense]\na = 1\n") == "nonsense");
  CHECK(field_of("[packet]\na0 = abc\n") == "packet.a0");
  CHECK(field_of("[packet]\nm = 5\n") == "packet.m");
  CHECK(field_of("[schedule]\ntimes = 1, 3, 2\n") == "schedule.times");
  CHECK(field_of("[acceptance]\noracle_tol = 0\n") == "acceptance.oracle_tol");
  CHECK(field_of("[interval]\npoints = 50\n") == "interval.points");
  CHECK(field_of("[analysis]\nfit_t1 = 10\n") == "analysis.fit_t2");
  CHECK(field_of("[potential]\nkind = piecewise\nsegments = -1:0:4; 0:1:2\n").empty());
  CHECK(field_of("[potential]\nkind = piecewise\nsegments = -1:0:-4\n") == "potential.segments");
}

TEST_CASE("piecewise configuration builds the potential") {
  const ExperimentConfig c =
      parse_config("[potential]\nkind = piecewise\nR = 1\nsegments = -1:0:4; 0:1:2\n");
  const PotentialSpec p = make_potential(c);
  CHECK(p.kind() == PotentialKind::PiecewiseConstant);
  CHECK(p(-0.5) == 4.0);
  CHECK(p(0.5) == 2.0);
}

TEST_CASE("CSV output") {
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  const auto dir = std::filesystem::temp_directory_path() / "qtail_csv_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "a.csv").string();
  {
    CsvWriter w(path, {"x", "y"});
    w.row(std::vector<double>{1.0, 1.0 / 3.0});
  }
  CHECK(slurp(path) == std::string(kUnitsLine) + "\nx,y\n1,0.33333333333333331\n");
}

TEST_CASE("amplitude tables are deterministic") {
  const auto dir = std::filesystem::temp_directory_path() / "qtail_det_test";
  std::filesystem::create_directories(dir);
  const AmplitudeSummary s = amplitude_summary(square_barrier(16.0, 1.0));
  CHECK(s.ks.size() == 400);
  CHECK(s.unitarity_error < 1e-12);
  CHECK(s.transfer_matrix_gap < 1e-12);
  write_amplitudes(s, (dir / "a.csv").string());
  write_amplitudes(amplitude_summary(square_barrier(16.0, 1.0)), (dir / "b.csv").string());
  CHECK(slurp((dir / "a.csv").string()) == slurp((dir / "b.csv").string()));
}

TEST_CASE("validate: free particle skips scattering checks") {
  ExperimentConfig c = default_config();
  c.v0 = 0.0;
  c.packets = {0};
  const auto rows = validate_invariants(c);
  bool skipped = false, oracle = false;
  for (const auto& r : rows) {
    CHECK(r.status != Status::Fail);
    if (r.name == "flux unitarity") skipped = r.status == Status::Skip;
    if (r.name.rfind("free evolution oracle", 0) == 0) oracle = r.status == Status::Pass;
  }
  CHECK(skipped);
  CHECK(oracle);
}

TEST_CASE("validate: barrier packet passes every invariant") {
  ExperimentConfig c = default_config();
  c.packets = {2};
  for (const auto& r : validate_invariants(c)) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.status != Status::Fail);
  }
}
