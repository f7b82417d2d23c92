#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "qtail/types.hpp"

namespace qtail {

/// Accumulates S(x) = sum_n gamma_n exp(i kappa_n x) for a fixed set of
/// sample points x, streaming over the nodes (kappa_n, gamma_n).
///
/// The sample points are grouped into blocks of half-width at most
/// `block_half_width`. Inside a block, nodes whose kappa lies within
/// 0.25 / block_half_width of a cluster anchor share a truncated Taylor
/// expansion in (x - block centre), so the per-sample cost is independent of
/// the node count. Truncation error is below 1e-17 relative to sum |gamma|.
///
/// Nodes should arrive in monotone kappa order within each stream; streams
/// let interleaved node families (e.g. +|k| and -|k|) keep compact clusters.
class FourierSum {
 public:
  static constexpr int kMoments = 13;

  FourierSum(const Eigen::Ref<const Eigen::VectorXd>& xs, int streams,
             double block_half_width = 2.0);

  void add(int stream, double kappa, cplx gamma);

  /// Also folds a common phase exp(i phase) into gamma; the phase is added
  /// to kappa * centre before a single sincos per block.
  void add_with_phase(int stream, double kappa, double phase, cplx gamma);

  Eigen::VectorXcd evaluate() const;

  Eigen::Index size() const noexcept { return xs_.size(); }

 private:
  struct Cluster {
    double anchor = 0.0;
    std::array<cplx, kMoments> moments{};
  };
  struct Accumulator {
    std::vector<Cluster> closed;
    Cluster open;
    bool has_open = false;
  };
  struct Block {
    double centre = 0.0;
    std::vector<Eigen::Index> members;
    std::vector<Accumulator> streams;
  };

  Eigen::VectorXd xs_;
  std::vector<Block> blocks_;
  double cluster_width_;
};

}  // namespace qtail
