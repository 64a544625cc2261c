#include "drbsde/tree_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "drbsde/errors.hpp"

namespace drbsde {

namespace {

struct TreeShape {
  int steps = 0;
  // lattice node index of each path node, per slice; children of path node
  // p are 3p+b at the next slice, at lattice index k+b
  std::vector<std::vector<int>> lattice_index;
  int non_terminal_count = 0;
};

TreeShape make_tree(const Lattice& lattice) {
  TreeShape ts;
  ts.steps = lattice.steps();
  ts.lattice_index.resize(static_cast<std::size_t>(ts.steps + 1));
  ts.lattice_index[0] = {0};
  for (int i = 0; i < ts.steps; ++i) {
    const auto& cur = ts.lattice_index[static_cast<std::size_t>(i)];
    auto& next = ts.lattice_index[static_cast<std::size_t>(i + 1)];
    next.resize(cur.size() * 3);
    for (std::size_t p = 0; p < cur.size(); ++p)
      for (int b = 0; b < 3; ++b) next[3 * p + b] = cur[p] + b;
    ts.non_terminal_count += static_cast<int>(cur.size());
  }
  return ts;
}

std::uint64_t power_or_throw(std::uint64_t base, int exponent,
                             std::uint64_t cap, const char* what) {
  std::uint64_t count = 1;
  for (int n = 0; n < exponent; ++n) {
    if (count > cap / base) throw CapError(what);
    count *= base;
  }
  if (count > cap) throw CapError(what);
  return count;
}

}  // namespace

double tree_sup_reflected_value(const Lattice& lattice,
                                const VolatilityGrid& grid,
                                const Driver& driver,
                                const TerminalFn& terminal,
                                const ObstaclePair& obstacles,
                                std::uint64_t cap) {
  const TreeShape ts = make_tree(lattice);
  const std::uint64_t count = power_or_throw(
      static_cast<std::uint64_t>(grid.size()), ts.non_terminal_count, cap,
      "tree oracle: path-strategy count exceeds cap");

  const double dt = lattice.dt();
  std::vector<double> xi;
  for (int k : ts.lattice_index.back())
    xi.push_back(terminal(lattice.state(ts.steps, k)));

  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> choice(static_cast<std::size_t>(ts.non_terminal_count));
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    std::uint64_t rem = idx;
    for (auto& c : choice) {
      c = static_cast<int>(rem % static_cast<std::uint64_t>(grid.size()));
      rem /= static_cast<std::uint64_t>(grid.size());
    }

    std::vector<double> values = xi;
    std::size_t offset = static_cast<std::size_t>(ts.non_terminal_count);
    for (int i = ts.steps - 1; i >= 0; --i) {
      const auto& nodes = ts.lattice_index[static_cast<std::size_t>(i)];
      offset -= nodes.size();
      const double t = lattice.time(i);
      std::vector<double> cur(nodes.size());
      for (std::size_t p = 0; p < nodes.size(); ++p) {
        const int vol = choice[offset + p];
        const auto branches = lattice.kernel(i, nodes[p], vol);
        double e = 0.0, cov = 0.0;
        for (int b = 0; b < 3; ++b) {
          e += branches[static_cast<std::size_t>(b)].prob *
               values[3 * p + static_cast<std::size_t>(b)];
          cov += branches[static_cast<std::size_t>(b)].prob *
                 values[3 * p + static_cast<std::size_t>(b)] *
                 branches[static_cast<std::size_t>(b)].increment;
        }
        const double a = lattice.variance(vol);
        const double z = cov / (a * dt);
        const double x = lattice.state(i, nodes[p]);
        const double cand = e + dt * driver.evaluate(t, x, e, z, a);
        cur[p] = std::min(obstacles.upper(t, x),
                          std::max(obstacles.lower(t, x), cand));
      }
      values = std::move(cur);
    }
    best = std::max(best, values[0]);
  }
  return best;
}

TreeDynkinResult tree_dynkin_values(const Lattice& lattice,
                                    const Strategy& strategy,
                                    const GamePayoff& payoff,
                                    std::uint64_t cap) {
  const TreeShape ts = make_tree(lattice);
  if (ts.non_terminal_count >= 62)
    throw CapError("tree oracle: rule count overflows");
  const std::uint64_t rules = std::uint64_t{1} << ts.non_terminal_count;
  if (rules > cap / rules || rules * rules > cap)
    throw CapError("tree oracle: rule pair count exceeds cap");

  const double dt = lattice.dt();
  std::vector<double> xi;
  for (int k : ts.lattice_index.back())
    xi.push_back(payoff.terminal(lattice.state(ts.steps, k)));

  // backward sweep with a fixed outer marking and the inner player's best
  // reply computed nodewise
  auto sweep = [&](std::uint64_t mask, bool outer_is_minimizer) {
    std::vector<double> values = xi;
    std::size_t offset = static_cast<std::size_t>(ts.non_terminal_count);
    for (int i = ts.steps - 1; i >= 0; --i) {
      const auto& nodes = ts.lattice_index[static_cast<std::size_t>(i)];
      offset -= nodes.size();
      const double t = lattice.time(i);
      std::vector<double> cur(nodes.size());
      for (std::size_t p = 0; p < nodes.size(); ++p) {
        const double x = lattice.state(i, nodes[p]);
        const bool marked = ((mask >> (offset + p)) & 1u) != 0;
        double val;
        if (outer_is_minimizer) {
          if (marked) {
            val = payoff.upper(t, x);
          } else {
            double e = 0.0;
            const auto branches =
                lattice.kernel(i, nodes[p], strategy.at(i, nodes[p]));
            for (int b = 0; b < 3; ++b)
              e += branches[static_cast<std::size_t>(b)].prob *
                   values[3 * p + static_cast<std::size_t>(b)];
            val = std::max(payoff.lower(t, x), e + dt * payoff.running(t, x));
          }
        } else {
          if (marked) {
            val = payoff.lower(t, x);
          } else {
            double e = 0.0;
            const auto branches =
                lattice.kernel(i, nodes[p], strategy.at(i, nodes[p]));
            for (int b = 0; b < 3; ++b)
              e += branches[static_cast<std::size_t>(b)].prob *
                   values[3 * p + static_cast<std::size_t>(b)];
            val = std::min(payoff.upper(t, x), e + dt * payoff.running(t, x));
          }
        }
        cur[p] = val;
      }
      values = std::move(cur);
    }
    return values[0];
  };

  TreeDynkinResult res;
  res.infsup = std::numeric_limits<double>::infinity();
  res.supinf = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < rules; ++mask) {
    res.infsup = std::min(res.infsup, sweep(mask, true));
    res.supinf = std::max(res.supinf, sweep(mask, false));
  }
  return res;
}

}  // namespace drbsde
