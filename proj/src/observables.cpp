#include "qtail/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qtail {

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, stderr_ = 0.0, r2 = 1.0;
  int n = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  f.n = static_cast<int>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / f.n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / f.n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < f.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < f.n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss_res += r * r;
  }
  f.stderr_ = f.n > 2 ? std::sqrt(ss_res / (f.n - 2) / sxx) : 0.0;
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

void log_samples(const ProbabilitySeries& s, double t1, double t2, std::vector<double>& lx,
                 std::vector<double>& ly) {
  const double slack = 1e-9;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double t = s.times[i];
    if (t <= 0.0 || t < t1 * (1 - slack) || t > t2 * (1 + slack)) continue;
    if (!(s.values[i] > 0.0)) {
      std::ostringstream os;
      os << "fit_power_law: P(" << t << ") = " << s.values[i]
         << " is not positive (interference zero?); shift the window";
      throw Error(os.str());
    }
    lx.push_back(std::log(t));
    ly.push_back(std::log(s.values[i]));
  }
}

}  // namespace

Probability nonescape(const WaveField& field, double a, double b) {
  if (!(a < b)) throw Error("nonescape: need a < b");
  const double tol = 1e-9 * (b - a);
  std::vector<std::pair<double, double>> pts;
  for (Eigen::Index i = 0; i < field.xs.size(); ++i)
    if (field.xs(i) >= a - tol && field.xs(i) <= b + tol)
      pts.emplace_back(field.xs(i), std::norm(field.values(i)));
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 200 || std::abs(pts.front().first - a) > tol ||
      std::abs(pts.back().first - b) > tol) {
    std::ostringstream os;
    os << "nonescape: grid coverage insufficient on [" << a << ", " << b << "] ("
       << pts.size() << " samples; at least 200 including both ends required)";
    throw Error(os.str());
  }
  const std::size_t n = pts.size() - 1;  // intervals
  const double h = (b - a) / n;
  bool uniform = true;
  for (std::size_t i = 0; i < n && uniform; ++i)
    uniform = std::abs(pts[i + 1].first - pts[i].first - h) <= 1e-7 * h;

  auto simpson = [&](std::size_t stride) {
    const std::size_t m = n / stride;
    double s = pts[0].second + pts[n].second;
    for (std::size_t j = 1; j < m; ++j) s += (j % 2 ? 4.0 : 2.0) * pts[j * stride].second;
    return s * h * stride / 3.0;
  };
  auto trapezoid = [&](std::size_t stride) {
    double s = 0.0;
    for (std::size_t i = 0; i + stride <= n; i += stride)
      s += 0.5 * (pts[i + stride].first - pts[i].first) * (pts[i].second + pts[i + stride].second);
    return s;
  };

  Probability p;
  if (uniform && n % 4 == 0) {
    const double fine = simpson(1), coarse = simpson(2);
    p.value = fine + (fine - coarse) / 15.0;
    p.error = std::abs(fine - coarse) / 15.0;
    p.method = "simpson-richardson";
  } else if (uniform && n % 2 == 0) {
    p.value = simpson(1);
    p.error = std::abs(p.value - trapezoid(1));
    p.method = "simpson";
  } else {
    p.value = trapezoid(1);
    p.error = n % 2 == 0 ? std::abs(p.value - trapezoid(2)) / 3.0 : std::abs(p.value);
    p.method = "trapezoid";
  }
  return p;
}

PowerLawFit fit_power_law(const ProbabilitySeries& series, double t1, double t2) {
  if (!(t1 > 0.0 && t2 > t1)) throw Error("fit_power_law: need 0 < t1 < t2");
  std::vector<double> lx, ly;
  log_samples(series, t1, t2, lx, ly);
  if (lx.size() < 10) {
    std::ostringstream os;
    os << "fit_power_law: only " << lx.size() << " samples in [" << t1 << ", " << t2
       << "], at least 10 required";
    throw Error(os.str());
  }
  const LineFit f = least_squares(lx, ly);
  PowerLawFit r;
  r.exponent = f.slope;
  r.stderr_ = f.stderr_;
  r.r2 = f.r2;
  r.t1 = t1;
  r.t2 = t2;
  r.prefactor = std::exp(f.intercept);
  r.points = f.n;
  return r;
}

WindowChoice auto_fit_window(const ProbabilitySeries& series, double band) {
  const auto& ts = series.times;
  if (ts.empty()) throw Error("auto_fit_window: empty series");
  const double t_last = ts.back();
  for (std::size_t i = ts.size(); i-- > 0;) {
    const double t1 = ts[i];
    if (t1 <= 0.0) break;
    if (10.0 * t1 > t_last * (1 + 1e-9)) continue;
    std::vector<double> slopes;
    bool ok = true;
    for (int q = 0; q < 4 && ok; ++q) {
      std::vector<double> lx, ly;
      try {
        log_samples(series, t1 * std::pow(10.0, 0.25 * q), t1 * std::pow(10.0, 0.25 * (q + 1)),
                    lx, ly);
      } catch (const Error&) {
        ok = false;
        break;
      }
      if (lx.size() < 3) {
        ok = false;
        break;
      }
      slopes.push_back(least_squares(lx, ly).slope);
    }
    if (!ok) continue;
    const double mean = std::accumulate(slopes.begin(), slopes.end(), 0.0) / slopes.size();
    const bool stable = std::all_of(slopes.begin(), slopes.end(),
                                    [&](double s) { return std::abs(s - mean) <= band; });
    if (stable) return {t1, 10.0 * t1, slopes};
  }
  throw Error("auto_fit_window: no decade with a stable log-log slope; extend the schedule");
}

double crossover_time(const std::vector<double>& times, const Eigen::VectorXcd& exact,
                      const Eigen::VectorXcd& asymptote, double fraction) {
  double t_c = std::numeric_limits<double>::infinity();
  for (std::size_t i = times.size(); i-- > 0;) {
    if (!(std::abs(exact(i) - asymptote(i)) <= fraction * std::abs(asymptote(i)))) break;
    t_c = times[i];
  }
  return t_c;
}

ProfileRegions three_region_profile(const ProbabilitySeries& series, double rel_noise) {
  ProfileRegions r;
  const auto& p = series.values;
  const std::size_t n = p.size();
  // Signs of successive differences, flat steps dropped.
  std::vector<int> sign;
  std::vector<std::size_t> at;  // index of the sample that starts each step
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = p[i + 1] - p[i];
    double noise = rel_noise * std::max(std::abs(p[i]), std::abs(p[i + 1]));
    if (i < series.errors.size() && i + 1 < series.errors.size())
      noise = std::max(noise, series.errors[i] + series.errors[i + 1]);
    if (std::abs(d) <= noise) continue;
    sign.push_back(d > 0 ? 1 : -1);
    at.push_back(i);
  }
  std::ostringstream os;
  if (sign.empty() || sign.front() != -1) {
    r.detail = "P(t) does not start by decreasing";
    return r;
  }
  std::size_t first_up = sign.size();
  for (std::size_t j = 0; j < sign.size(); ++j)
    if (sign[j] == 1) {
      first_up = j;
      break;
    }
  if (first_up == sign.size()) {
    r.detail = "P(t) decreases monotonically; no revival";
    return r;
  }
  std::size_t last_up = first_up;
  for (std::size_t j = first_up; j < sign.size(); ++j)
    if (sign[j] == 1) last_up = j;
  if (last_up + 1 == sign.size()) {
    r.detail = "P(t) is still increasing at the last sample";
    return r;
  }
  const std::size_t i_min = at[first_up];
  const std::size_t i_last_max = at[last_up] + 1;
  std::size_t i_peak = i_min;
  for (std::size_t i = i_min; i <= i_last_max; ++i)
    if (p[i] > p[i_peak]) i_peak = i;
  r.first_minimum = series.times[i_min];
  r.revival_peak = series.times[i_peak];
  r.decay_from = series.times[i_last_max];
  r.found = p[i_peak] > p[i_min];
  os << "decrease to t = " << r.first_minimum << " (P = " << p[i_min] << "), revival peak at t = "
     << r.revival_peak << " (P = " << p[i_peak] << "), monotone decay after t = " << r.decay_from;
  r.detail = os.str();
  return r;
}

}  // namespace qtail
