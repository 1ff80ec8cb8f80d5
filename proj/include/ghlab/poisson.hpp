#pragma once

// Periodic grid, cloud-in-cell deposition/gather and a spectral Poisson solve
// for -lap u = rho - <rho>, E = -grad u.

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ghlab/geometry.hpp"
#include "ghlab/particles.hpp"

namespace ghl {

/// Uniform periodic grid on [0, L1) x [0, L2) x [0, L3); nodes at i h.
class Grid3 {
 public:
  /// Cell counts must be powers of two >= 8 and lengths > 0.
  Grid3(std::array<int, 3> cells, const Vec3& lengths);
  static Grid3 cube(int cells, double length = 1.0) { return Grid3({cells, cells, cells}, {length, length, length}); }

  const std::array<int, 3>& cells() const { return n_; }
  const Vec3& lengths() const { return len_; }
  double spacing(int axis) const { return len_[axis] / n_[axis]; }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  double volume() const { return len_.x * len_.y * len_.z; }
  std::size_t size() const { return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]; }
  /// Row-major index, last axis fastest.
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_[1] + j) * n_[2] + k;
  }
  Vec3 node(int i, int j, int k) const { return {i * spacing(0), j * spacing(1), k * spacing(2)}; }
  Vec3 wrap(const Vec3& x) const;

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  std::array<int, 3> n_;
  Vec3 len_;
};

struct ScalarField {
  Grid3 grid;
  std::vector<double> values;
  explicit ScalarField(const Grid3& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  double mean() const;
};

struct VectorField {
  Grid3 grid;
  std::vector<Vec3> values;
  explicit VectorField(const Grid3& g) : grid(g), values(g.size()) {}
};

/// rho = sum_p w_p S(x - x_p) / cell volume with the trilinear kernel S.
ScalarField deposit_charge(const ParticleEnsemble& particles, const Grid3& grid);
/// J = sum_p w_p v_p S(x - x_p) / cell volume.
VectorField deposit_current(const ParticleEnsemble& particles, const Grid3& grid);

/// Trilinear gather, the adjoint of the deposits.
Vec3 interpolate(const VectorField& field, const Vec3& x);
double interpolate(const ScalarField& field, const Vec3& x);

struct PoissonSolution {
  ScalarField u;
  VectorField E;
};

/// Reusable FFT workspace for one grid. Not safe for concurrent solve() calls.
class PoissonSolver {
 public:
  explicit PoissonSolver(const Grid3& grid);
  ~PoissonSolver();
  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  const Grid3& grid() const { return grid_; }
  /// Zero-mean u with -lap u = rho - <rho>; E = -grad u spectrally (the
  /// Nyquist derivative is zeroed).
  PoissonSolution solve(const ScalarField& rho);
  /// Spectral divergence of a vector field.
  ScalarField divergence(const VectorField& field);
  /// Spectral Laplacian of a scalar field.
  ScalarField laplacian(const ScalarField& field);
  /// Keeps the Fourier modes with |m_i| <= kmax on every axis.
  ScalarField low_pass(const ScalarField& field, int kmax);

 private:
  struct Impl;
  Grid3 grid_;
  std::unique_ptr<Impl> impl_;
};

PoissonSolution solve_poisson(const ScalarField& rho);

/// (h^3 sum |g|^p)^(1/p).
double lp_norm(const ScalarField& field, double p);
/// L^p norm of |J|.
double lp_norm(const VectorField& field, double p);
/// int |E|^2 dx = int |grad u|^2 dx.
double field_energy(const VectorField& E);

struct MomentNorms {
  double l2_f = 0.0;
  double kinetic_energy = 0.0;
  double rho_l75 = 0.0;
  double j_l76 = 0.0;
};

/// Norms of a particle ensemble on a grid. l2_f is a histogram estimate with
/// the grid cells in x and cubes of side `v_bin` in v.
MomentNorms moment_norms(const ParticleEnsemble& particles, const Grid3& grid, double v_bin = 0.25);

/// Flat binary snapshot: "GHL1", uint32 n1 n2 n3 ncomp, f64 L1 L2 L3, then
/// n1 n2 n3 ncomp little-endian doubles, row-major, components interleaved.
void write_snapshot(const std::string& path, const ScalarField& field);
void write_snapshot(const std::string& path, const VectorField& field);
struct Snapshot {
  std::array<int, 3> cells{};
  Vec3 lengths;
  int components = 0;
  std::vector<double> data;
};
Snapshot read_snapshot(const std::string& path);
/// CSV with columns i, j, k, x, y, z, value (or value_1..3).
void write_snapshot_csv(const std::string& path, const ScalarField& field);
void write_snapshot_csv(const std::string& path, const VectorField& field);

}  // namespace ghl
