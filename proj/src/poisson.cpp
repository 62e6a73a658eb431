#include "tf/poisson.hpp"

#include "tf/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

namespace tf {

namespace {

// FFTW's planner is not thread-safe; execution with new-array functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

} // namespace

double unit_cube_inverse_distance_average() {
  const double s3 = std::sqrt(3.0);
  return 3.0 * std::log((s3 + 1.0) / (s3 - 1.0)) - std::numbers::pi / 2.0;
}

struct PoissonSolver::Impl {
  Grid3D grid;
  std::array<std::size_t, 3> padded{};
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  std::vector<double> kernel_hat; // real-valued: the kernel is even
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

PoissonSolver::PoissonSolver(const Grid3D& grid) : impl_(std::make_unique<Impl>()) {
  grid.validate();
  if (!grid.is_cubic()) throw ConfigurationError("Poisson solver requires cubic cells");
  auto& I = *impl_;
  I.grid = grid;
  for (int a = 0; a < 3; ++a) I.padded[a] = 2 * grid.extents[a];
  const std::size_t Mx = I.padded[0], My = I.padded[1], Mz = I.padded[2];
  I.real_size = Mx * My * Mz;
  const std::size_t Mxc = Mx / 2 + 1;
  I.complex_size = Mxc * My * Mz;

  auto in = alloc_real(I.real_size);
  auto out = alloc_complex(I.complex_size);
  if (!in || !out) throw ConfigurationError("grid too large: cannot allocate padded Poisson buffers");

  {
    std::lock_guard lock(planner_mutex());
    // FFTW uses row-major with the last index fastest; our x is fastest.
    I.forward = fftw_plan_dft_r2c_3d(static_cast<int>(Mz), static_cast<int>(My), static_cast<int>(Mx), in.get(),
                                     out.get(), FFTW_ESTIMATE);
    I.backward = fftw_plan_dft_c2r_3d(static_cast<int>(Mz), static_cast<int>(My), static_cast<int>(Mx), out.get(),
                                      in.get(), FFTW_ESTIMATE);
  }
  if (!I.forward || !I.backward) throw ConfigurationError("FFTW planning failed");

  const double h = grid.spacing[0];
  const double h3 = h * h * h;
  auto wrap = [](std::size_t m, std::size_t M) {
    return m <= M / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(M);
  };
  for (std::size_t k = 0; k < Mz; ++k) {
    const double dz = wrap(k, Mz);
    for (std::size_t j = 0; j < My; ++j) {
      const double dy = wrap(j, My);
      for (std::size_t i = 0; i < Mx; ++i) {
        const double dx = wrap(i, Mx);
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        const double G = d == 0.0 ? unit_cube_inverse_distance_average() / h : 1.0 / (h * d);
        in[i + Mx * (j + My * k)] = G * h3;
      }
    }
  }
  fftw_execute_dft_r2c(I.forward, in.get(), out.get());
  I.kernel_hat.resize(I.complex_size);
  const double norm = 1.0 / static_cast<double>(I.real_size);
  for (std::size_t q = 0; q < I.complex_size; ++q) I.kernel_hat[q] = out[q][0] * norm;
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

const Grid3D& PoissonSolver::grid() const { return impl_->grid; }

ScalarField3D PoissonSolver::solve(const ScalarField3D& source) const {
  const auto& I = *impl_;
  if (!(source.grid == I.grid)) throw DomainError("source grid does not match the Poisson solver grid");
  const std::size_t nx = I.grid.extents[0], ny = I.grid.extents[1], nz = I.grid.extents[2];
  const std::size_t Mx = I.padded[0], My = I.padded[1];

  auto in = alloc_real(I.real_size);
  auto out = alloc_complex(I.complex_size);
  std::fill(in.get(), in.get() + I.real_size, 0.0);
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) in[i + Mx * (j + My * k)] = source.values[I.grid.index(i, j, k)];

  fftw_execute_dft_r2c(I.forward, in.get(), out.get());
  for (std::size_t q = 0; q < I.complex_size; ++q) {
    out[q][0] *= I.kernel_hat[q];
    out[q][1] *= I.kernel_hat[q];
  }
  fftw_execute_dft_c2r(I.backward, out.get(), in.get());

  ScalarField3D result(I.grid);
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) result.values[I.grid.index(i, j, k)] = in[i + Mx * (j + My * k)];
  return result;
}

ScalarField3D poisson_solve(const Grid3D& grid, const ScalarField3D& source) {
  return PoissonSolver(grid).solve(source);
}

} // namespace tf
