#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "drbsde/errors.hpp"
#include "drbsde/instances.hpp"
#include "drbsde/lattice.hpp"

using namespace drbsde;

TEST_CASE("volatility grid validates its levels") {
  CHECK_THROWS_AS(VolatilityGrid({}), InputError);
  CHECK_THROWS_AS(VolatilityGrid({0.2, 0.2}), InputError);
  CHECK_THROWS_AS(VolatilityGrid({0.3, 0.2}), InputError);
  CHECK_THROWS_AS(VolatilityGrid({-0.1, 0.2}), InputError);
  const VolatilityGrid grid({0.1, 0.2});
  CHECK(grid.a_lower() == doctest::Approx(0.01));
  CHECK(grid.a_upper() == doctest::Approx(0.04));
}

TEST_CASE("single level, unit stretch splits mass evenly") {
  const VolatilityGrid grid({0.3});
  const Lattice lat = build_lattice(1.0, 1, 0.0, grid);
  const auto branches = lat.kernel(0, 0, 0);
  CHECK(branches[0].prob == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(branches[1].prob == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(branches[2].prob == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("two levels share the widest grid") {
  const VolatilityGrid grid({0.1, 0.2});
  const Lattice lat = build_lattice(1.0, 2, 0.0, grid);
  const auto low = lat.kernel(0, 0, 0);
  CHECK(low[0].prob == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(low[1].prob == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(low[2].prob == doctest::Approx(0.125).epsilon(1e-14));
  const auto high = lat.kernel(0, 0, 1);
  CHECK(high[0].prob == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("kernels match their moments") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    InstanceProfile profile;
    profile.min_steps = 1;
    profile.max_steps = 5;
    profile.vol_count = (rep % 2) + 1;
    const Instance inst = make_instance(rng, profile);
    for (int j = 0; j < inst.lattice.vol_count(); ++j)
      for (int i = 0; i < inst.lattice.steps(); ++i)
        for (int k = 0; k < inst.lattice.slice_size(i); ++k) {
          double total = 0.0, mean = 0.0, var = 0.0;
          for (const auto& b : inst.lattice.kernel(i, k, j)) {
            total += b.prob;
            mean += b.prob * b.increment;
            var += b.prob * b.increment * b.increment;
          }
          CHECK(std::abs(total - 1.0) <= 1e-12);
          CHECK(std::abs(mean) <= 1e-12);
          CHECK(std::abs(var - inst.lattice.variance(j) * inst.lattice.dt()) <=
                1e-12);
        }
  }
}

TEST_CASE("stretch below one breaks the probability bounds") {
  const VolatilityGrid grid({0.2});
  CHECK_THROWS_AS(build_lattice(1.0, 2, 0.0, grid, 0.5), InputError);
  CHECK_NOTHROW(build_lattice(1.0, 2, 0.0, grid, 1.5));
}

TEST_CASE("strategy enumeration counts") {
  const VolatilityGrid one({0.2});
  const VolatilityGrid two({0.1, 0.2});

  const Lattice lat1 = build_lattice(1.0, 1, 0.0, two);
  CHECK(enumerate_strategies(lat1, one, 1 << 20).size() == 1);
  CHECK(enumerate_strategies(lat1, two, 1 << 20).size() == 2);

  // two levels over the four non-terminal nodes of a two-step lattice
  const Lattice lat2 = build_lattice(1.0, 2, 0.0, two);
  const auto strategies = enumerate_strategies(lat2, two, 1 << 20);
  CHECK(strategies.size() == 16);
  std::set<std::vector<std::vector<int>>> distinct;
  for (const auto& s : strategies) distinct.insert(s.choice);
  CHECK(distinct.size() == 16);

  CHECK_THROWS_AS(enumerate_strategies(lat2, two, 15), CapError);
}

TEST_CASE("kernel expectation examples") {
  const VolatilityGrid grid({0.1, 0.2});
  const Lattice lat = build_lattice(1.0, 2, 0.0, grid);

  const std::vector<double> constant(3, 7.5);
  CHECK(kernel_expectation(lat, 0, 0, 0, constant) ==
        doctest::Approx(7.5).epsilon(1e-14));

  std::vector<double> increments;
  for (const auto& b : lat.kernel(0, 0, 1)) increments.push_back(b.increment);
  CHECK(std::abs(kernel_expectation(lat, 0, 0, 1, increments)) <= 1e-15);

  // hand-computed dot product against the level-0 weights 1/8, 3/4, 1/8
  const std::vector<double> values{2.0, -3.0, 10.0};
  const double expected = 0.125 * 2.0 + 0.75 * (-3.0) + 0.125 * 10.0;
  CHECK(kernel_expectation(lat, 0, 0, 0, values) ==
        doctest::Approx(expected).epsilon(1e-14));

  CHECK_THROWS_AS(kernel_expectation(lat, 0, 0, 0, std::vector<double>(2)),
                  InputError);
}

TEST_CASE("kernel expectation is monotone in the value vector") {
  std::mt19937_64 rng(42);
  const VolatilityGrid grid({0.15, 0.3});
  const Lattice lat = build_lattice(1.0, 3, 0.0, grid);
  for (int rep = 0; rep < 200; ++rep) {
    const int slice = uniform_int(rng, 0, 2);
    const int node = uniform_int(rng, 0, lat.slice_size(slice) - 1);
    const int vol = uniform_int(rng, 0, 1);
    std::vector<double> lo(static_cast<std::size_t>(lat.slice_size(slice + 1)));
    std::vector<double> hi(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) {
      lo[k] = uniform(rng, -5.0, 5.0);
      hi[k] = lo[k] + uniform(rng, 0.0, 3.0);
    }
    CHECK(kernel_expectation(lat, slice, node, vol, hi) >=
          kernel_expectation(lat, slice, node, vol, lo) - 1e-14);
  }
}
