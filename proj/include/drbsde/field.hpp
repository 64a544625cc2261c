#pragma once

#include <vector>

#include "drbsde/lattice.hpp"

namespace drbsde {

/// Per-node scalar field: values[slice][node], slices 0..steps.
using NodeField = std::vector<std::vector<double>>;

NodeField make_node_field(const Lattice& lattice, double init = 0.0);

/// Max over all nodes of |a - b|. Fields must have the same shape.
double max_abs_diff(const NodeField& a, const NodeField& b);

double max_abs(const NodeField& a);

}  // namespace drbsde
