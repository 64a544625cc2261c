#include "drbsde/field.hpp"

#include <cmath>
#include <cstddef>

#include "drbsde/errors.hpp"

namespace drbsde {

NodeField make_node_field(const Lattice& lattice, double init) {
  NodeField f(static_cast<std::size_t>(lattice.slice_count()));
  for (int i = 0; i < lattice.slice_count(); ++i)
    f[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(lattice.slice_size(i)), init);
  return f;
}

double max_abs_diff(const NodeField& a, const NodeField& b) {
  if (a.size() != b.size()) throw InputError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size())
      throw InputError("max_abs_diff: shape mismatch");
    for (std::size_t k = 0; k < a[i].size(); ++k)
      m = std::max(m, std::abs(a[i][k] - b[i][k]));
  }
  return m;
}

double max_abs(const NodeField& a) {
  double m = 0.0;
  for (const auto& row : a)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace drbsde
