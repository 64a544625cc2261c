#include "drbsde/driver.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "drbsde/errors.hpp"

namespace drbsde {

Driver zero_driver() {
  return Driver{[](double, double, double, double, double) { return 0.0; },
                0.0, 0.0};
}

Driver build_driver_from_hamiltonian(
    std::function<double(double, double, double, double, double)> hamiltonian,
    std::vector<double> gamma_grid, double lipschitz_y, double lipschitz_z) {
  if (gamma_grid.empty())
    throw InputError("hamiltonian driver: empty gamma grid");
  bool has_zero = false;
  for (double g : gamma_grid)
    if (g == 0.0) has_zero = true;
  if (!has_zero)
    throw InputError("hamiltonian driver: gamma grid must contain 0");

  auto h = std::make_shared<
      std::function<double(double, double, double, double, double)>>(
      std::move(hamiltonian));
  auto grid = std::make_shared<std::vector<double>>(std::move(gamma_grid));
  Driver d;
  d.lipschitz_y = lipschitz_y;
  d.lipschitz_z = lipschitz_z;
  d.evaluate = [h, grid](double t, double x, double y, double z, double a) {
    double best = -std::numeric_limits<double>::infinity();
    for (double gamma : *grid) {
      const double v = 0.5 * a * gamma - (*h)(t, x, y, z, gamma);
      if (v > best) best = v;
    }
    return best;
  };
  return d;
}

std::vector<double> terminal_values_of(const Lattice& lattice,
                                       const TerminalFn& terminal) {
  const int last = lattice.steps();
  std::vector<double> xi(static_cast<std::size_t>(lattice.slice_size(last)));
  for (int k = 0; k < lattice.slice_size(last); ++k)
    xi[static_cast<std::size_t>(k)] = terminal(lattice.state(last, k));
  return xi;
}

void validate_separation(const Lattice& lattice,
                         const ObstaclePair& obstacles) {
  if (!(obstacles.gap > 0.0))
    throw InputError("obstacles: separation gap must be positive");
  for (int i = 0; i < lattice.slice_count(); ++i) {
    const double t = lattice.time(i);
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const double x = lattice.state(i, k);
      const double lo = obstacles.lower(t, x);
      const double up = obstacles.upper(t, x);
      if (!(lo + obstacles.gap <= up)) {
        std::ostringstream msg;
        msg << "obstacles: separation violated at slice " << i << ", state "
            << x << " (lower " << lo << ", upper " << up << ", gap "
            << obstacles.gap << ")";
        throw InputError(msg.str());
      }
    }
  }
}

void validate_problem(const Lattice& lattice, const ObstaclePair& obstacles,
                      const std::vector<double>& terminal_values) {
  validate_separation(lattice, obstacles);
  const int last = lattice.steps();
  const double t = lattice.time(last);
  for (int k = 0; k < lattice.slice_size(last); ++k) {
    const double x = lattice.state(last, k);
    const double lo = obstacles.lower(t, x);
    const double up = obstacles.upper(t, x);
    const double xi = terminal_values[static_cast<std::size_t>(k)];
    if (!(lo <= xi && xi <= up)) {
      std::ostringstream msg;
      msg << "terminal condition incompatible with obstacles at state " << x
          << " (lower " << lo << ", value " << xi << ", upper " << up << ")";
      throw InputError(msg.str());
    }
  }
}

double max_lipschitz_violation(const Driver& driver, std::mt19937_64& rng,
                               int samples, double t, double x, double a,
                               double span) {
  auto u01 = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  auto draw = [&]() { return span * (2.0 * u01() - 1.0); };
  double worst = 0.0;
  const double sa = std::sqrt(a);
  for (int s = 0; s < samples; ++s) {
    const double y1 = draw(), y2 = draw(), z1 = draw(), z2 = draw();
    const double lhs = std::abs(driver.evaluate(t, x, y1, z1, a) -
                                driver.evaluate(t, x, y2, z2, a));
    const double rhs = driver.lipschitz_y * std::abs(y1 - y2) +
                       driver.lipschitz_z * sa * std::abs(z1 - z2);
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

}  // namespace drbsde
