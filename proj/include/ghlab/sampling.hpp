#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ghlab/distributions.hpp"
#include "ghlab/particles.hpp"

namespace ghl {

/// Digitally shifted 7-dimensional Sobol sequence: each coordinate of the
/// Sobol point is XORed with a 64-bit shift drawn from mt19937_64(seed), then
/// mapped to the open interval (0, 1).
std::vector<UnitPoint> scrambled_sobol(std::size_t count, std::uint64_t seed);

/// N equal-weight particles (w = mass / N) drawn from f0 through its sampler.
/// Rejects f0 without a sampler or with a non-finite or non-positive mass.
ParticleEnsemble sample_initial(const VelocityFunction& f0, std::size_t count, std::uint64_t seed);

}  // namespace ghl
