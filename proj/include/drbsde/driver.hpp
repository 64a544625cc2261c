#pragma once

#include <functional>
#include <random>
#include <vector>

#include "drbsde/lattice.hpp"

namespace drbsde {

/// Terminal payoff as a function of the terminal state.
using TerminalFn = std::function<double(double x)>;

/// Time-and-state surface, e.g. an obstacle or a running reward.
using SurfaceFn = std::function<double(double t, double x)>;

/// Generator F(t, x, y, z, a) of the backward equation, where a is the
/// instantaneous variance selected at the node. The declared Lipschitz
/// constants bound |F(..,y,z,a) - F(..,y',z',a)| by
/// lipschitz_y*|y-y'| + lipschitz_z*sqrt(a)*|z-z'|.
struct Driver {
  std::function<double(double t, double x, double y, double z, double a)>
      evaluate;
  double lipschitz_y = 0.0;
  double lipschitz_z = 0.0;
};

Driver zero_driver();

/// Generator obtained as the Fenchel transform in gamma of a Hamiltonian
/// H(t, x, y, z, gamma): F(.., a) = max over grid gamma of
/// { a*gamma/2 - H(.., gamma) }. The grid must contain 0 so F >= -H(..,0).
Driver build_driver_from_hamiltonian(
    std::function<double(double t, double x, double y, double z, double gamma)>
        hamiltonian,
    std::vector<double> gamma_grid, double lipschitz_y = 0.0,
    double lipschitz_z = 0.0);

/// Two obstacle surfaces with a declared strict separation
/// lower + gap <= upper, and gap > 0.
struct ObstaclePair {
  SurfaceFn lower;
  SurfaceFn upper;
  double gap = 0.0;
};

/// Checks strict separation at every lattice node and terminal
/// compatibility lower(T,x) <= terminal(x) <= upper(T,x). Throws InputError.
void validate_problem(const Lattice& lattice, const ObstaclePair& obstacles,
                      const std::vector<double>& terminal_values);

/// Separation check alone. Stopping games are well defined even when the
/// terminal payoff leaves the obstacle band, so the game operations use
/// this weaker validation.
void validate_separation(const Lattice& lattice,
                         const ObstaclePair& obstacles);

std::vector<double> terminal_values_of(const Lattice& lattice,
                                       const TerminalFn& terminal);

/// Worst violation of the declared Lipschitz bound over `samples` random
/// quadruples drawn from [-span, span]^2 x [-span, span]^2 at variance a.
double max_lipschitz_violation(const Driver& driver, std::mt19937_64& rng,
                               int samples, double t, double x, double a,
                               double span);

}  // namespace drbsde
