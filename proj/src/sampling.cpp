#include "ghlab/sampling.hpp"

#include <array>
#include <boost/random/sobol.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ghl {

std::vector<UnitPoint> scrambled_sobol(std::size_t count, std::uint64_t seed) {
  constexpr std::size_t dim = std::tuple_size_v<UnitPoint>;
  std::mt19937_64 rng(seed);
  std::array<std::uint64_t, dim> shift{};
  for (auto& s : shift) s = rng();
  boost::random::sobol engine(dim);
  std::vector<UnitPoint> out(count);
  for (auto& p : out) {
    for (std::size_t d = 0; d < dim; ++d) {
      const std::uint64_t bits = static_cast<std::uint64_t>(engine()) ^ shift[d];
      p[d] = static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }
  }
  return out;
}

ParticleEnsemble sample_initial(const VelocityFunction& f0, std::size_t count, std::uint64_t seed) {
  if (!f0.sampler) throw std::invalid_argument("sample_initial: f0 '" + f0.name + "' has no sampler");
  if (!f0.mass || !std::isfinite(*f0.mass) || !(*f0.mass > 0.0)) {
    throw std::invalid_argument("sample_initial: f0 must have a finite positive mass");
  }
  if (count == 0) throw std::invalid_argument("sample_initial: particle count must be > 0");
  ParticleEnsemble ens;
  ens.resize(count);
  const double w = *f0.mass / static_cast<double>(count);
  const std::vector<UnitPoint> pts = scrambled_sobol(count, seed);
  for (std::size_t n = 0; n < count; ++n) {
    const PhasePoint p = f0.sampler(pts[n]);
    ens.x[n] = p.x;
    ens.v[n] = p.v;
    ens.w[n] = w;
  }
  ens.validate();
  return ens;
}

}  // namespace ghl
