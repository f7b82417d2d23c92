#include <doctest.h>

#include <cmath>

#include "qtail/observables.hpp"
#include "qtail/packets.hpp"
#include "qtail/propagation.hpp"

using namespace qtail;

namespace {

ProbabilitySeries power_series(double lo, double hi, int per_decade,
                               const std::function<double(double)>& p) {
  ProbabilitySeries s;
  const int n = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade));
  for (int i = 0; i <= n; ++i) {
    const double t = lo * std::pow(10.0, double(i) / per_decade);
    s.times.push_back(t);
    s.values.push_back(p(t));
    s.errors.push_back(0.0);
    s.methods.push_back("synthetic");
  }
  return s;
}

WaveField field_on(const Eigen::VectorXd& xs, const Eigen::VectorXcd& v) {
  WaveField f;
  f.xs = xs;
  f.values = v;
  return f;
}

}  // namespace

TEST_CASE("nonescape probability of the initial packet is erf(2)") {
  const PacketSpec p = normalize(0, 1.0, 1.0, -20.0);
  const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(401, -22.0, -18.0);
  const Probability pr = nonescape(field_on(xs, position_amplitude_exact(p, xs)), -22.0, -18.0);
  CHECK(pr.value == doctest::Approx(std::erf(2.0)).epsilon(1e-10));
  CHECK(std::abs(pr.value - 0.99532) < 1e-5);
  CHECK(pr.method == "simpson-richardson");
  CHECK(pr.error < 1e-9);
}

TEST_CASE("nonescape edge cases") {
  const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(401, -22.0, -18.0);
  CHECK(nonescape(field_on(xs, Eigen::VectorXcd::Zero(401)), -22.0, -18.0).value == 0.0);
  const Eigen::VectorXd few = Eigen::VectorXd::LinSpaced(101, -22.0, -18.0);
  CHECK_THROWS_AS(nonescape(field_on(few, Eigen::VectorXcd::Ones(101)), -22.0, -18.0), Error);
  CHECK_THROWS_AS(nonescape(field_on(xs, Eigen::VectorXcd::Ones(401)), -23.0, -18.0), Error);
  CHECK(nonescape(field_on(xs, Eigen::VectorXcd::Ones(401)), -22.0, -18.0).value ==
        doctest::Approx(4.0).epsilon(1e-14));
  const Eigen::VectorXd odd = Eigen::VectorXd::LinSpaced(402, -22.0, -18.0);
  const Probability t = nonescape(field_on(odd, Eigen::VectorXcd::Ones(402)), -22.0, -18.0);
  CHECK(t.method == "trapezoid");
  CHECK(t.value == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("resolution doubling changes P(t) by less than 1e-6") {
  const PotentialSpec pot = square_barrier(16.0, 1.0);
  const PacketSpec p = normalize(0, 1.0, 1.0, -20.0);
  for (double t : {5.0, 30.0}) {
    const Eigen::VectorXd x1 = Eigen::VectorXd::LinSpaced(401, -22.0, -18.0);
    const Eigen::VectorXd x2 = Eigen::VectorXd::LinSpaced(801, -22.0, -18.0);
    const double p1 = nonescape(evolve_spectral(pot, p, x1, t), -22.0, -18.0).value;
    const double p2 = nonescape(evolve_spectral(pot, p, x2, t), -22.0, -18.0).value;
    CHECK(std::abs(p1 - p2) < 1e-6);
  }
}

TEST_CASE("fit of an exact power law") {
  const auto s = power_series(1.0, 1e4, 20, [](double t) { return 2.5 * std::pow(t, -3.0); });
  const PowerLawFit f = fit_power_law(s, 10.0, 1e3);
  CHECK(std::abs(f.exponent + 3.0) < 1e-12);
  CHECK(f.prefactor == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.points == 41);
  CHECK_THROWS_AS(fit_power_law(s, 10.0, 12.0), Error);
  CHECK_THROWS_AS(fit_power_law(s, 0.0, 12.0), Error);
}

TEST_CASE("fit with a subleading correction") {
  const auto s = power_series(1.0, 1e4, 20, [](double t) {
    return std::pow(t, -3.0) * (1.0 + 0.5 / std::sqrt(t));
  });
  const PowerLawFit f = fit_power_law(s, 1e2, 1e4);
  CHECK(f.exponent > -3.05);
  CHECK(f.exponent < -2.95);
}

TEST_CASE("nonpositive values are rejected") {
  auto s = power_series(1.0, 1e3, 20, [](double t) { return std::pow(t, -3.0); });
  s.values[30] = 0.0;
  CHECK_THROWS_AS(fit_power_law(s, 1.0, 1e3), Error);
}

TEST_CASE("automatic window selects the latest stable decade") {
  const auto s = power_series(0.1, 1e4, 20, [](double t) {
    return t < 50.0 ? std::exp(-t) : std::pow(t, -5.0);
  });
  const WindowChoice w = auto_fit_window(s, 0.05);
  CHECK(w.t2 == doctest::Approx(1e4));
  CHECK(w.t1 == doctest::Approx(1e3));
  REQUIRE(w.local_slopes.size() == 4);
  for (double sl : w.local_slopes) CHECK(sl == doctest::Approx(-5.0));

  const auto wavy = power_series(1.0, 1e3, 20, [](double t) { return 2.0 + std::sin(t); });
  CHECK_THROWS_AS(auto_fit_window(wavy, 0.05), Error);
}

TEST_CASE("crossover time") {
  const std::vector<double> ts{1, 2, 3, 4, 5};
  Eigen::VectorXcd a = Eigen::VectorXcd::Ones(5), s(5);
  s << 3.0, 1.2, 2.0, 1.1, 0.9;
  CHECK(crossover_time(ts, s, a, 0.5) == 4.0);
  s(4) = 5.0;
  CHECK(std::isinf(crossover_time(ts, s, a, 0.5)));
}

TEST_CASE("three-region profile detection") {
  ProbabilitySeries s;
  for (int i = 0; i <= 60; ++i) {
    const double t = i * 0.5;
    s.times.push_back(t);
    const double v = t < 5 ? 1.0 - 0.15 * t : (t < 10 ? 0.25 + 0.02 * (t - 5) : 0.35 * std::pow(t / 10.0, -3.0));
    s.values.push_back(v);
  }
  const ProfileRegions r = three_region_profile(s);
  CHECK(r.found);
  CHECK(r.first_minimum == doctest::Approx(5.0));
  CHECK(r.revival_peak == doctest::Approx(10.0));
  CHECK(r.decay_from == doctest::Approx(10.0));

  ProbabilitySeries mono = s;
  for (std::size_t i = 0; i < mono.values.size(); ++i) mono.values[i] = std::exp(-mono.times[i]);
  CHECK(!three_region_profile(mono).found);
}
