#include "qtail/fourier_sum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qtail/quadrature.hpp"

namespace qtail {

FourierSum::FourierSum(const Eigen::Ref<const Eigen::VectorXd>& xs, int streams,
                       double block_half_width)
    : xs_(xs), cluster_width_(0.25 / block_half_width) {
  std::vector<Eigen::Index> order(xs_.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return xs_(a) < xs_(b); });
  std::size_t i = 0;
  while (i < order.size()) {
    Block block;
    const double start = xs_(order[i]);
    while (i < order.size() && xs_(order[i]) - start <= 2.0 * block_half_width)
      block.members.push_back(order[i++]);
    block.centre = 0.5 * (start + xs_(block.members.back()));
    block.streams.resize(streams);
    blocks_.push_back(std::move(block));
  }
}

void FourierSum::add(int stream, double kappa, cplx gamma) {
  add_with_phase(stream, kappa, 0.0, gamma);
}

void FourierSum::add_with_phase(int stream, double kappa, double phase, cplx gamma) {
  for (auto& block : blocks_) {
    auto& acc = block.streams[stream];
    if (acc.has_open && std::abs(kappa - acc.open.anchor) > cluster_width_) {
      acc.closed.push_back(acc.open);
      acc.has_open = false;
    }
    if (!acc.has_open) {
      acc.open = Cluster{};
      acc.open.anchor = kappa;
      acc.has_open = true;
    }
    static constexpr auto inverse = [] {
      std::array<double, kMoments> inv{};
      for (int p = 0; p < kMoments; ++p) inv[p] = 1.0 / (p + 1);
      return inv;
    }();
    cplx term = gamma * std::polar(1.0, phase + kappa * block.centre);
    const double delta = kappa - acc.open.anchor;
    for (int p = 0; p < kMoments; ++p) {
      acc.open.moments[p] += term;
      // term *= i delta / (p + 1)
      const double f = delta * inverse[p];
      term = cplx(-term.imag() * f, term.real() * f);
    }
  }
}

Eigen::VectorXcd FourierSum::evaluate() const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(xs_.size());
  for (const auto& block : blocks_) {
    for (Eigen::Index idx : block.members) {
      const double dx = xs_(idx) - block.centre;
      cplx total{0.0, 0.0};
      auto sum_cluster = [&](const Cluster& c) {
        cplx poly = c.moments[kMoments - 1];
        for (int p = kMoments - 2; p >= 0; --p) poly = poly * dx + c.moments[p];
        total += poly * std::polar(1.0, c.anchor * dx);
      };
      for (const auto& acc : block.streams) {
        for (const auto& c : acc.closed) sum_cluster(c);
        if (acc.has_open) sum_cluster(acc.open);
      }
      out(idx) = total;
    }
  }
  return out;
}

GaussRule gauss_legendre(int order) {
  auto build = [](const auto& abscissa, const auto& weights, bool odd) {
    const int half = static_cast<int>(abscissa.size());
    const int n = odd ? 2 * half - 1 : 2 * half;
    GaussRule rule{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    int k = 0;
    for (int i = half - 1; i >= (odd ? 1 : 0); --i, ++k) {
      rule.nodes(k) = -abscissa[i];
      rule.weights(k) = weights[i];
    }
    for (int i = 0; i < half; ++i) {
      if (odd && i == 0) {
        rule.nodes(k) = 0.0;
      } else {
        rule.nodes(k) = abscissa[i];
      }
      rule.weights(k++) = weights[i];
    }
    return rule;
  };
  using boost::math::quadrature::gauss;
  switch (order) {
    case 4: return build(gauss<double, 4>::abscissa(), gauss<double, 4>::weights(), false);
    case 6: return build(gauss<double, 6>::abscissa(), gauss<double, 6>::weights(), false);
    case 8: return build(gauss<double, 8>::abscissa(), gauss<double, 8>::weights(), false);
    case 10: return build(gauss<double, 10>::abscissa(), gauss<double, 10>::weights(), false);
    case 12: return build(gauss<double, 12>::abscissa(), gauss<double, 12>::weights(), false);
    case 16: return build(gauss<double, 16>::abscissa(), gauss<double, 16>::weights(), false);
    case 20: return build(gauss<double, 20>::abscissa(), gauss<double, 20>::weights(), false);
    default: throw Error("gauss_legendre: unsupported order " + std::to_string(order));
  }
}

}  // namespace qtail
