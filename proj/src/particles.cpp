#include "ghlab/particles.hpp"

#include <cmath>
#include <stdexcept>

namespace ghl {

double ParticleEnsemble::total_weight() const {
  double s = 0.0;
  for (double wi : w) s += wi;
  return s;
}

double ParticleEnsemble::kinetic_energy() const {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * norm2(v[i]);
  return s;
}

void ParticleEnsemble::validate() const {
  if (v.size() != x.size() || w.size() != x.size()) {
    throw std::invalid_argument("ParticleEnsemble: array sizes differ");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i])) {
      throw std::invalid_argument("ParticleEnsemble: weights must be finite and >= 0");
    }
    if (!is_finite(x[i]) || !is_finite(v[i])) {
      throw std::invalid_argument("ParticleEnsemble: non-finite particle state");
    }
  }
}

}  // namespace ghl
