#pragma once

#include <cmath>
#include <span>

#include "drbsde/driver.hpp"
#include "drbsde/lattice.hpp"

namespace drbsde {

/// Scheme options shared by the backward solvers. The default scheme is
/// explicit: the generator is evaluated at the kernel expectation of the
/// next slice. Picard refinement re-evaluates the generator at the current
/// iterate, for stiff y-dependence.
struct SolveOptions {
  bool picard = false;
  int picard_max_iter = 50;
  double picard_tol = 1e-12;
};

/// One backward step at a node under a fixed volatility level, before any
/// obstacle handling: conditional expectation, representation coefficient,
/// and the unconstrained candidate value e + dt * F.
struct StepEval {
  double expectation;
  double z;
  double candidate;
};

inline StepEval eval_step(const Lattice& lattice, int slice, int node, int vol,
                          std::span<const double> next_values,
                          const Driver& driver, const SolveOptions& opts) {
  double e = 0.0;
  double cov = 0.0;
  for (const auto& b : lattice.kernel(slice, node, vol)) {
    const double v = next_values[static_cast<std::size_t>(b.child)];
    e += b.prob * v;
    cov += b.prob * v * b.increment;
  }
  const double a = lattice.variance(vol);
  const double dt = lattice.dt();
  const double z = cov / (a * dt);
  const double t = lattice.time(slice);
  const double x = lattice.state(slice, node);
  double candidate = e + dt * driver.evaluate(t, x, e, z, a);
  if (opts.picard) {
    for (int it = 0; it < opts.picard_max_iter; ++it) {
      const double next = e + dt * driver.evaluate(t, x, candidate, z, a);
      const bool done = std::abs(next - candidate) <= opts.picard_tol;
      candidate = next;
      if (done) break;
    }
  }
  return {e, z, candidate};
}

}  // namespace drbsde
