#include "drbsde/lattice.hpp"

#include <cmath>
#include <sstream>

#include "drbsde/errors.hpp"

namespace drbsde {

VolatilityGrid::VolatilityGrid(std::vector<double> levels)
    : levels_(std::move(levels)) {
  if (levels_.empty()) throw InputError("volatility grid: no levels");
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    if (!(levels_[j] > 0.0))
      throw InputError("volatility grid: levels must be strictly positive");
    if (j > 0 && !(levels_[j] > levels_[j - 1]))
      throw InputError("volatility grid: levels must be strictly increasing");
  }
}

Lattice::Lattice(double horizon, int steps, double x0,
                 const VolatilityGrid& grid, double stretch, double moment_tol)
    : horizon_(horizon), steps_(steps), x0_(x0) {
  if (!(horizon > 0.0)) throw InputError("lattice: horizon must be positive");
  if (steps < 1) throw InputError("lattice: steps must be >= 1");
  dt_ = horizon / steps;
  const double sigma_max = grid.level(grid.size() - 1);
  dx_ = stretch * sigma_max * std::sqrt(dt_);

  const double scaled = stretch * sigma_max;
  for (int j = 0; j < grid.size(); ++j) {
    const double a = grid.variance(j);
    // zero mean and variance a*dt on {-dx, 0, +dx}; the dt factor cancels,
    // which keeps the top level at exactly one half per side
    const double p_side = a / (2.0 * scaled * scaled);
    const double p_mid = 1.0 - 2.0 * p_side;
    if (!(p_side >= 0.0) || p_side > 1.0 || p_mid < 0.0 || p_mid > 1.0) {
      std::ostringstream msg;
      msg << "lattice: branch probability outside [0,1] for level "
          << grid.level(j) << " (stretch " << stretch
          << " too small for the volatility spread)";
      throw InputError(msg.str());
    }
    const double mean = -dx_ * p_side + 0.0 * p_mid + dx_ * p_side;
    const double var = dx_ * dx_ * p_side + 0.0 * p_mid + dx_ * dx_ * p_side;
    if (std::abs(mean) > 1e-12 ||
        std::abs(var - a * dt_) > moment_tol * std::max(1.0, a * dt_)) {
      throw NumericsError("lattice: moment matching failed");
    }
    sigmas_.push_back(grid.level(j));
    variances_.push_back(a);
    probs_.push_back({p_side, p_mid, p_side});
  }
}

Lattice build_lattice(double horizon, int steps, double x0,
                      const VolatilityGrid& grid, double stretch,
                      double moment_tol) {
  return Lattice(horizon, steps, x0, grid, stretch, moment_tol);
}

Strategy strategy_from_index(const Lattice& lattice, int vol_count,
                             std::uint64_t index) {
  Strategy s;
  s.choice.resize(static_cast<std::size_t>(lattice.steps()));
  const auto base = static_cast<std::uint64_t>(vol_count);
  for (int i = 0; i < lattice.steps(); ++i) {
    auto& row = s.choice[static_cast<std::size_t>(i)];
    row.resize(static_cast<std::size_t>(lattice.slice_size(i)));
    for (auto& c : row) {
      c = static_cast<int>(index % base);
      index /= base;
    }
  }
  return s;
}

Strategy constant_strategy(const Lattice& lattice, int vol_index) {
  Strategy s;
  s.choice.resize(static_cast<std::size_t>(lattice.steps()));
  for (int i = 0; i < lattice.steps(); ++i)
    s.choice[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(lattice.slice_size(i)), vol_index);
  return s;
}

std::uint64_t strategy_count(const Lattice& lattice, int vol_count,
                             std::uint64_t cap) {
  std::uint64_t count = 1;
  for (int n = 0; n < lattice.non_terminal_node_count(); ++n) {
    if (count > cap / static_cast<std::uint64_t>(vol_count))
      throw CapError("strategy enumeration: count exceeds cap");
    count *= static_cast<std::uint64_t>(vol_count);
  }
  if (count > cap) throw CapError("strategy enumeration: count exceeds cap");
  return count;
}

std::vector<Strategy> enumerate_strategies(const Lattice& lattice,
                                           const VolatilityGrid& grid,
                                           std::uint64_t cap) {
  const std::uint64_t count = strategy_count(lattice, grid.size(), cap);
  std::vector<Strategy> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t idx = 0; idx < count; ++idx)
    out.push_back(strategy_from_index(lattice, grid.size(), idx));
  return out;
}

double kernel_expectation(const Lattice& lattice, int slice, int node, int vol,
                          std::span<const double> next_values) {
  if (static_cast<int>(next_values.size()) != lattice.slice_size(slice + 1))
    throw InputError("kernel_expectation: value vector has wrong size");
  double e = 0.0;
  for (const auto& b : lattice.kernel(slice, node, vol))
    e += b.prob * next_values[static_cast<std::size_t>(b.child)];
  return e;
}

}  // namespace drbsde
