#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "varalpha/alpha_field.hpp"
#include "varalpha/sim.hpp"

namespace varalpha {

enum class BoundaryKind { Periodic, Dirichlet0, Neumann0 };

const char* to_string(BoundaryKind b);

// Cell-centered uniform grid: n_x cells on [x_min, x_max], centers at
// x_min + (i + 1/2) dx with dx = (x_max - x_min) / n_x. Cell centering gives
// all three boundary closures the same spacing (walls sit on cell faces).
struct Grid1D {
  double x_min = -1.0;
  double x_max = 1.0;
  int n_x = 64;
  BoundaryKind boundary = BoundaryKind::Periodic;

  double dx() const { return (x_max - x_min) / n_x; }
  double center(int i) const { return x_min + (i + 0.5) * dx(); }
  std::vector<double> centers() const;
};

// Discrete memory weights for order alpha in (0,1):
//   b_j = ((j+1)^(1-alpha) - j^(1-alpha)) / (Gamma(2-alpha) dt^alpha),
// j = 0..n-1. Positive, strictly decreasing in j; the b_0 term dominates,
// which is what makes the implicit step an M-matrix solve.
std::vector<double> l1_weights(double alpha, std::size_t n, double dt);

// Time-stepped solution values: q is row-major, (n_steps+1) rows of n_x
// values; row 0 is the initial condition.
struct FieldSolution {
  Grid1D grid;
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::vector<double> t_grid;
  std::vector<double> orders;  // per cell center
  std::vector<double> q;

  double value(std::size_t n, std::size_t i) const { return q[n * grid.n_x + i]; }
  const double* row(std::size_t n) const { return q.data() + n * grid.n_x; }
  // Linear interpolation between cell centers at time index n (periodic
  // domains wrap; otherwise edge cells extend).
  double interpolate(std::size_t n, double x) const;
};

// Implicit one-step method for the memory diffusion problem: at each time
// level the discrete memory operator (weights per cell, order frozen at the
// cell center) balances half the discrete second difference of the new
// state. Each step is one tridiagonal solve (cyclic for periodic domains).
FieldSolution solve_fde(const AlphaField& field, const Grid1D& grid,
                        const std::vector<double>& initial, double t_final,
                        double dt);

// Same, with the per-cell orders given directly (orders in (0,1)).
FieldSolution solve_fde_orders(std::vector<double> orders, const Grid1D& grid,
                               const std::vector<double>& initial,
                               double t_final, double dt);

// Defect of the integrated-form identity at the final time:
//   max_i | int_0^T (q(s,x_i)-q0(x_i)) nu(T-s,x_i) ds
//          - 1/2 Dxx int_0^T q(s,x_i) ds |
// with nu(s,x) = s^(-alpha(x))/Gamma(1-alpha(x)). The weakly singular kernel
// is integrated exactly against piecewise-linear-in-time q (product
// integration); the right side uses the trapezoid rule in time and the same
// boundary closure as the solver. Constant states have residual ~ 1e-14.
double mild_residual(const FieldSolution& sol);

struct McPdePoint {
  double x0 = 0.0;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  double pde_value = 0.0;
  double diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct McPdeReport {
  std::vector<McPdePoint> points;
  double max_abs_diff = 0.0;
  bool pass = false;
  std::size_t paths_per_point = 0;
  std::size_t incomplete_paths = 0;
};

// Monte Carlo expectation E[u(X(T)) | X(0)=x0] for each start point against
// the solver value q(T, x0). Per-point tolerance max(3 * MC standard error,
// rel_tol * |q|). Streams are (base_seed, point_index * n_paths + i).
McPdeReport compare_mc_pde(const AlphaField& field, const Grid1D& grid,
                           const std::function<double(double)>& u0,
                           double t_final, double pde_dt, const SimConfig& sim_cfg,
                           const std::vector<double>& start_points,
                           std::size_t n_paths, std::uint64_t base_seed,
                           double rel_tol = 0.02, int threads = 1);

// Long-format CSV rows (t, x, q); metadata lines are the caller's job.
void write_solution_csv(const FieldSolution& sol, std::ostream& os,
                        std::size_t time_stride = 1);

// Binary matrix dump, little-endian: magic "VAQD", u32 version, u64 field
// hash, f64 dt, f64 x_min, f64 x_max, u32 n_x, u32 boundary, u64 row count,
// then rows of n_x f64 values.
void write_solution_dump(const FieldSolution& sol, std::uint64_t field_hash,
                         std::ostream& os);
FieldSolution read_solution_dump(std::istream& is,
                                 std::uint64_t* field_hash_out = nullptr);

}  // namespace varalpha
