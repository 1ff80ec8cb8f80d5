#include "ghlab/poisson.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>

#include "ghlab/csv.hpp"
#include "ghlab/parallel.hpp"

namespace ghl {

static_assert(std::endian::native == std::endian::little, "snapshots assume a little-endian host");

namespace {

constexpr std::size_t kDepositBlock = 8192;

struct Stencil {
  std::array<int, 2> i, j, k;
  std::array<double, 2> wi, wj, wk;
};

Stencil stencil(const Grid3& g, const Vec3& x_raw) {
  const Vec3 x = g.wrap(x_raw);
  Stencil s;
  for (int a = 0; a < 3; ++a) {
    const int n = g.cells()[a];
    const double u = x[a] / g.spacing(a);
    double fl = std::floor(u);
    double frac = u - fl;
    int i0 = static_cast<int>(fl) % n;
    if (i0 < 0) i0 += n;
    const std::array<int, 2> idx{i0, (i0 + 1) % n};
    const std::array<double, 2> wt{1.0 - frac, frac};
    if (a == 0) { s.i = idx; s.wi = wt; }
    if (a == 1) { s.j = idx; s.wj = wt; }
    if (a == 2) { s.k = idx; s.wk = wt; }
  }
  return s;
}

template <class T, class Value>
void scatter(std::vector<T>& grid_values, const Grid3& g, const Vec3& x, const Value& value) {
  const Stencil s = stencil(g, x);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        grid_values[g.index(s.i[a], s.j[b], s.k[c])] += (s.wi[a] * s.wj[b] * s.wk[c]) * value;
}

template <class T, class ValueOf>
std::vector<T> deposit(const ParticleEnsemble& p, const Grid3& g, const ValueOf& value_of) {
  const std::size_t blocks = block_count(p.size(), kDepositBlock);
  std::vector<std::vector<T>> partial(blocks);
  parallel_blocks(p.size(), kDepositBlock, [&](const BlockRange& r) {
    std::vector<T> local(g.size(), T{});
    for (std::size_t n = r.begin; n < r.end; ++n) scatter(local, g, p.x[n], value_of(n));
    partial[r.index] = std::move(local);
  });
  std::vector<T> out(g.size(), T{});
  for (const auto& part : partial)
    for (std::size_t n = 0; n < out.size(); ++n) out[n] += part[n];
  const double inv_vol = 1.0 / g.cell_volume();
  for (auto& o : out) o = o * inv_vol;
  return out;
}

template <class T>
T gather(const std::vector<T>& values, const Grid3& g, const Vec3& x) {
  const Stencil s = stencil(g, x);
  T out{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        out += (s.wi[a] * s.wj[b] * s.wk[c]) * values[g.index(s.i[a], s.j[b], s.k[c])];
  return out;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid3::Grid3(std::array<int, 3> cells, const Vec3& lengths) : n_(cells), len_(lengths) {
  for (int a = 0; a < 3; ++a) {
    if (n_[a] < 8 || !is_power_of_two(n_[a])) {
      throw std::invalid_argument("Grid3: cell counts must be powers of two >= 8");
    }
    if (!(len_[a] > 0.0) || !std::isfinite(len_[a])) {
      throw std::invalid_argument("Grid3: box lengths must be finite and > 0");
    }
  }
}

Vec3 Grid3::wrap(const Vec3& x) const {
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    double y = std::fmod(x[a], len_[a]);
    if (y < 0.0) y += len_[a];
    if (y >= len_[a]) y = 0.0;
    out[a] = y;
  }
  return out;
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

ScalarField deposit_charge(const ParticleEnsemble& particles, const Grid3& grid) {
  ScalarField rho(grid);
  rho.values = deposit<double>(particles, grid, [&](std::size_t n) { return particles.w[n]; });
  return rho;
}

VectorField deposit_current(const ParticleEnsemble& particles, const Grid3& grid) {
  VectorField j(grid);
  j.values = deposit<Vec3>(particles, grid,
                           [&](std::size_t n) { return particles.w[n] * particles.v[n]; });
  return j;
}

Vec3 interpolate(const VectorField& field, const Vec3& x) { return gather(field.values, field.grid, x); }

double interpolate(const ScalarField& field, const Vec3& x) {
  return gather(field.values, field.grid, x);
}

// --- spectral solver ------------------------------------------------------

struct PoissonSolver::Impl {
  int n1, n2, n3, n3c;
  std::size_t real_size, complex_size;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_complex* work = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> k1, k2, k3;      // wavenumbers
  std::vector<double> d1, d2, d3;      // derivative symbols (Nyquist zeroed)

  explicit Impl(const Grid3& g) {
    n1 = g.cells()[0];
    n2 = g.cells()[1];
    n3 = g.cells()[2];
    n3c = n3 / 2 + 1;
    real_size = static_cast<std::size_t>(n1) * n2 * n3;
    complex_size = static_cast<std::size_t>(n1) * n2 * n3c;
    real = fftw_alloc_real(real_size);
    spec = fftw_alloc_complex(complex_size);
    work = fftw_alloc_complex(complex_size);
    if (!real || !spec || !work) throw std::bad_alloc();
    forward = fftw_plan_dft_r2c_3d(n1, n2, n3, real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_3d(n1, n2, n3, work, real, FFTW_ESTIMATE);
    auto axis = [](int n, double len, std::vector<double>& k, std::vector<double>& d, int count) {
      k.resize(count);
      d.resize(count);
      for (int m = 0; m < count; ++m) {
        const int s = m <= n / 2 ? m : m - n;
        k[m] = 2.0 * std::numbers::pi * s / len;
        d[m] = (2 * m == n) ? 0.0 : k[m];
      }
    };
    axis(n1, g.lengths()[0], k1, d1, n1);
    axis(n2, g.lengths()[1], k2, d2, n2);
    axis(n3, g.lengths()[2], k3, d3, n3c);
  }
  ~Impl() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
    fftw_free(work);
  }
  std::size_t cidx(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n2 + j) * n3c + k;
  }
  void to_spectrum(const std::vector<double>& values) {
    std::copy(values.begin(), values.end(), real);
    fftw_execute(forward);
  }
  // Inverse transform of work (destroyed), normalized, into out.
  template <class Out>
  void from_work(Out&& store) {
    fftw_execute(backward);
    const double inv = 1.0 / static_cast<double>(real_size);
    for (std::size_t n = 0; n < real_size; ++n) store(n, real[n] * inv);
  }
  // work = symbol(i,j,k) * spec
  template <class Symbol>
  void apply(const Symbol& symbol) {
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        for (int k = 0; k < n3c; ++k) {
          const std::size_t c = cidx(i, j, k);
          const std::complex<double> z(spec[c][0], spec[c][1]);
          const std::complex<double> r = symbol(i, j, k) * z;
          work[c][0] = r.real();
          work[c][1] = r.imag();
        }
  }
};

PoissonSolver::PoissonSolver(const Grid3& grid) : grid_(grid), impl_(std::make_unique<Impl>(grid)) {}
PoissonSolver::~PoissonSolver() = default;

PoissonSolution PoissonSolver::solve(const ScalarField& rho) {
  if (!(rho.grid == grid_)) throw std::invalid_argument("PoissonSolver: grid mismatch");
  Impl& m = *impl_;
  m.to_spectrum(rho.values);
  auto inv_lap = [&m](int i, int j, int k) {
    const double k2 = m.k1[i] * m.k1[i] + m.k2[j] * m.k2[j] + m.k3[k] * m.k3[k];
    return k2 == 0.0 ? 0.0 : 1.0 / k2;
  };
  PoissonSolution out{ScalarField(grid_), VectorField(grid_)};
  m.apply([&](int i, int j, int k) { return std::complex<double>(inv_lap(i, j, k), 0.0); });
  m.from_work([&](std::size_t n, double v) { out.u.values[n] = v; });
  const std::array<const std::vector<double>*, 3> sym{&m.d1, &m.d2, &m.d3};
  for (int a = 0; a < 3; ++a) {
    // E_a = -d_a u  ->  -i k_a u_hat
    m.apply([&](int i, int j, int k) {
      const int idx = a == 0 ? i : (a == 1 ? j : k);
      return std::complex<double>(0.0, -(*sym[a])[idx] * inv_lap(i, j, k));
    });
    m.from_work([&](std::size_t n, double v) { out.E.values[n][a] = v; });
  }
  return out;
}

ScalarField PoissonSolver::divergence(const VectorField& field) {
  if (!(field.grid == grid_)) throw std::invalid_argument("PoissonSolver: grid mismatch");
  Impl& m = *impl_;
  ScalarField out(grid_);
  std::vector<double> comp(grid_.size());
  for (int a = 0; a < 3; ++a) {
    for (std::size_t n = 0; n < comp.size(); ++n) comp[n] = field.values[n][a];
    m.to_spectrum(comp);
    const std::vector<double>& d = a == 0 ? m.d1 : (a == 1 ? m.d2 : m.d3);
    m.apply([&](int i, int j, int k) {
      const int idx = a == 0 ? i : (a == 1 ? j : k);
      return std::complex<double>(0.0, d[idx]);
    });
    m.from_work([&](std::size_t n, double v) { out.values[n] += v; });
  }
  return out;
}

ScalarField PoissonSolver::laplacian(const ScalarField& field) {
  if (!(field.grid == grid_)) throw std::invalid_argument("PoissonSolver: grid mismatch");
  Impl& m = *impl_;
  ScalarField out(grid_);
  m.to_spectrum(field.values);
  m.apply([&](int i, int j, int k) {
    return std::complex<double>(-(m.k1[i] * m.k1[i] + m.k2[j] * m.k2[j] + m.k3[k] * m.k3[k]), 0.0);
  });
  m.from_work([&](std::size_t n, double v) { out.values[n] = v; });
  return out;
}

ScalarField PoissonSolver::low_pass(const ScalarField& field, int kmax) {
  if (!(field.grid == grid_)) throw std::invalid_argument("PoissonSolver: grid mismatch");
  Impl& m = *impl_;
  ScalarField out(grid_);
  m.to_spectrum(field.values);
  auto keep = [kmax](int idx, int n) {
    const int s = idx <= n / 2 ? idx : idx - n;
    return std::abs(s) <= kmax && 2 * idx != n;
  };
  m.apply([&](int i, int j, int k) {
    return std::complex<double>(keep(i, m.n1) && keep(j, m.n2) && keep(k, m.n3) ? 1.0 : 0.0, 0.0);
  });
  m.from_work([&](std::size_t n, double v) { out.values[n] = v; });
  return out;
}

PoissonSolution solve_poisson(const ScalarField& rho) {
  PoissonSolver solver(rho.grid);
  return solver.solve(rho);
}

// --- norms ----------------------------------------------------------------

double lp_norm(const ScalarField& field, double p) {
  double s = 0.0;
  for (double v : field.values) s += std::pow(std::abs(v), p);
  return std::pow(field.grid.cell_volume() * s, 1.0 / p);
}

double lp_norm(const VectorField& field, double p) {
  double s = 0.0;
  for (const Vec3& v : field.values) s += std::pow(norm(v), p);
  return std::pow(field.grid.cell_volume() * s, 1.0 / p);
}

double field_energy(const VectorField& E) {
  double s = 0.0;
  for (const Vec3& e : E.values) s += norm2(e);
  return s * E.grid.cell_volume();
}

MomentNorms moment_norms(const ParticleEnsemble& particles, const Grid3& grid, double v_bin) {
  if (!(v_bin > 0.0)) throw std::invalid_argument("moment_norms: v_bin must be > 0");
  MomentNorms out;
  out.kinetic_energy = particles.kinetic_energy();
  out.rho_l75 = lp_norm(deposit_charge(particles, grid), 7.0 / 5.0);
  out.j_l76 = lp_norm(deposit_current(particles, grid), 7.0 / 6.0);

  // Ordered map keeps the summation order independent of hashing.
  std::map<std::array<std::int64_t, 6>, double> bins;
  for (std::size_t n = 0; n < particles.size(); ++n) {
    const Vec3 x = grid.wrap(particles.x[n]);
    std::array<std::int64_t, 6> key{};
    for (int a = 0; a < 3; ++a) {
      key[a] = std::min<std::int64_t>(static_cast<std::int64_t>(x[a] / grid.spacing(a)),
                                      grid.cells()[a] - 1);
      key[3 + a] = static_cast<std::int64_t>(std::floor(particles.v[n][a] / v_bin));
    }
    bins[key] += particles.w[n];
  }
  const double bin_volume = grid.cell_volume() * v_bin * v_bin * v_bin;
  double s = 0.0;
  for (const auto& [key, mass] : bins) s += mass * mass;
  out.l2_f = std::sqrt(s / bin_volume);
  return out;
}

// --- snapshots ------------------------------------------------------------

namespace {

void write_snapshot_raw(const std::string& path, const Grid3& g, int ncomp, const double* data,
                        std::size_t count) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write("GHL1", 4);
  const std::uint32_t dims[4] = {static_cast<std::uint32_t>(g.cells()[0]),
                                 static_cast<std::uint32_t>(g.cells()[1]),
                                 static_cast<std::uint32_t>(g.cells()[2]),
                                 static_cast<std::uint32_t>(ncomp)};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  const double len[3] = {g.lengths().x, g.lengths().y, g.lengths().z};
  out.write(reinterpret_cast<const char*>(len), sizeof len);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_snapshot(const std::string& path, const ScalarField& field) {
  write_snapshot_raw(path, field.grid, 1, field.values.data(), field.values.size());
}

void write_snapshot(const std::string& path, const VectorField& field) {
  std::vector<double> flat;
  flat.reserve(3 * field.values.size());
  for (const Vec3& v : field.values) {
    flat.push_back(v.x);
    flat.push_back(v.y);
    flat.push_back(v.z);
  }
  write_snapshot_raw(path, field.grid, 3, flat.data(), flat.size());
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GHL1", 4) != 0) throw std::runtime_error("bad snapshot magic: " + path);
  std::uint32_t dims[4];
  double len[3];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  in.read(reinterpret_cast<char*>(len), sizeof len);
  Snapshot s;
  s.cells = {static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2])};
  s.lengths = {len[0], len[1], len[2]};
  s.components = static_cast<int>(dims[3]);
  s.data.resize(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2] * dims[3]);
  in.read(reinterpret_cast<char*>(s.data.data()), static_cast<std::streamsize>(s.data.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated snapshot: " + path);
  return s;
}

namespace {

template <class Row>
void write_grid_csv(const std::string& path, const Grid3& g, const std::string& value_header,
                    const Row& row) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "i,j,k,x,y,z," << value_header << '\n';
  auto num = [](double v) { return format_scientific(v); };
  for (int i = 0; i < g.cells()[0]; ++i)
    for (int j = 0; j < g.cells()[1]; ++j)
      for (int k = 0; k < g.cells()[2]; ++k) {
        const Vec3 x = g.node(i, j, k);
        out << i << ',' << j << ',' << k << ',' << num(x.x) << ',' << num(x.y) << ',' << num(x.z);
        for (double v : row(g.index(i, j, k))) out << ',' << num(v);
        out << '\n';
      }
}

}  // namespace

void write_snapshot_csv(const std::string& path, const ScalarField& field) {
  write_grid_csv(path, field.grid, "value",
                 [&](std::size_t n) { return std::vector<double>{field.values[n]}; });
}

void write_snapshot_csv(const std::string& path, const VectorField& field) {
  write_grid_csv(path, field.grid, "value_1,value_2,value_3", [&](std::size_t n) {
    const Vec3& v = field.values[n];
    return std::vector<double>{v.x, v.y, v.z};
  });
}

}  // namespace ghl
