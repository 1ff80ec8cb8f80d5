#pragma once

#include <cstddef>
#include <vector>

#include "ghlab/geometry.hpp"

namespace ghl {

/// Weighted samples (x_i, v_i, w_i) of a phase-space density.
struct ParticleEnsemble {
  std::vector<Vec3> x;
  std::vector<Vec3> v;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
  void resize(std::size_t n) {
    x.resize(n);
    v.resize(n);
    w.resize(n);
  }
  /// Sum of weights, accumulated in index order.
  double total_weight() const;
  /// Sum of w |v|^2.
  double kinetic_energy() const;
  /// Throws std::invalid_argument on size mismatch, negative or non-finite data.
  void validate() const;
};

}  // namespace ghl
