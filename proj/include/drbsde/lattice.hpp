#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace drbsde {

/// Finite, strictly increasing family of volatility levels. The induced
/// variance band is [a_lower, a_upper] = [min^2, max^2].
class VolatilityGrid {
 public:
  explicit VolatilityGrid(std::vector<double> levels);

  const std::vector<double>& levels() const { return levels_; }
  int size() const { return static_cast<int>(levels_.size()); }
  double level(int j) const { return levels_[static_cast<std::size_t>(j)]; }
  double variance(int j) const { return level(j) * level(j); }
  double a_lower() const { return variance(0); }
  double a_upper() const { return variance(size() - 1); }

 private:
  std::vector<double> levels_;
};

struct KernelBranch {
  int child;         ///< node index in the next slice
  double prob;       ///< branch probability
  double increment;  ///< signed state move realized on this branch
};

/// Recombining trinomial lattice for the canonical (martingale) state.
///
/// Slice i holds 2i+1 nodes; node k sits at x0 + (k - i) * dx with
/// dx = stretch * sigma_max * sqrt(dt). All volatility levels share this
/// space grid; the level only changes the branch probabilities, which are
/// the unique zero-mean, variance-matching weights on {-dx, 0, +dx}.
class Lattice {
 public:
  Lattice(double horizon, int steps, double x0, const VolatilityGrid& grid,
          double stretch, double moment_tol);

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double x0() const { return x0_; }
  double dx() const { return dx_; }

  int slice_count() const { return steps_ + 1; }
  int slice_size(int slice) const { return 2 * slice + 1; }
  double time(int slice) const { return slice * dt_; }
  double state(int slice, int node) const { return x0_ + (node - slice) * dx_; }

  int vol_count() const { return static_cast<int>(variances_.size()); }
  double variance(int vol) const { return variances_[static_cast<std::size_t>(vol)]; }
  double sigma(int vol) const { return sigmas_[static_cast<std::size_t>(vol)]; }

  /// Branch distribution at (slice, node) under volatility level `vol`.
  /// Children live at next-slice indices node, node+1, node+2.
  std::array<KernelBranch, 3> kernel(int slice, int node, int vol) const {
    const auto& p = probs_[static_cast<std::size_t>(vol)];
    (void)slice;
    return {KernelBranch{node, p[0], -dx_}, KernelBranch{node + 1, p[1], 0.0},
            KernelBranch{node + 2, p[2], dx_}};
  }

  /// Number of nodes with at least one outgoing transition: steps^2.
  int non_terminal_node_count() const { return steps_ * steps_; }

 private:
  double horizon_;
  int steps_;
  double dt_;
  double x0_;
  double dx_;
  std::vector<double> sigmas_;
  std::vector<double> variances_;
  std::vector<std::array<double, 3>> probs_;  // {down, mid, up} per level
};

/// Adapted volatility selection: one level index per non-terminal node.
struct Strategy {
  std::vector<std::vector<int>> choice;  ///< [slice][node], slices 0..steps-1
  int at(int slice, int node) const {
    return choice[static_cast<std::size_t>(slice)][static_cast<std::size_t>(node)];
  }
};

Lattice build_lattice(double horizon, int steps, double x0,
                      const VolatilityGrid& grid, double stretch = 1.0,
                      double moment_tol = 1e-10);

/// Decodes strategy number `index` as base-`vol_count` digits over the
/// flattened non-terminal nodes (slice-major, then node).
Strategy strategy_from_index(const Lattice& lattice, int vol_count,
                             std::uint64_t index);

Strategy constant_strategy(const Lattice& lattice, int vol_index);

/// Total number of adapted strategies, |levels|^(non-terminal nodes).
/// Throws CapError when the count exceeds `cap` (or overflows).
std::uint64_t strategy_count(const Lattice& lattice, int vol_count,
                             std::uint64_t cap);

/// The complete list of adapted strategies. Throws CapError past `cap`.
std::vector<Strategy> enumerate_strategies(const Lattice& lattice,
                                           const VolatilityGrid& grid,
                                           std::uint64_t cap);

/// Sum of p_b * next_values[child_b] over the branch distribution.
double kernel_expectation(const Lattice& lattice, int slice, int node, int vol,
                          std::span<const double> next_values);

}  // namespace drbsde
