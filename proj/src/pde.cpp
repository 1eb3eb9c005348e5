#include "varalpha/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "varalpha/stats.hpp"

namespace varalpha {

namespace {

void check_grid(const Grid1D& g) {
  if (!(g.x_max > g.x_min)) throw std::invalid_argument("grid: x_max must exceed x_min");
  if (g.n_x < 4) throw std::invalid_argument("grid: need at least 4 cells");
}

// Reusable LU factorization of a tridiagonal system (Thomas algorithm).
struct TriFactor {
  std::vector<double> m;   // 1 / pivot
  std::vector<double> cp;  // scaled upper diagonal
  std::vector<double> sub;

  void factor(const std::vector<double>& sub_in, const std::vector<double>& diag,
              const std::vector<double>& sup) {
    const std::size_t n = diag.size();
    m.resize(n);
    cp.resize(n);
    sub = sub_in;
    double piv = diag[0];
    m[0] = 1.0 / piv;
    cp[0] = sup[0] * m[0];
    for (std::size_t i = 1; i < n; ++i) {
      piv = diag[i] - sub[i] * cp[i - 1];
      m[i] = 1.0 / piv;  // strictly diagonally dominant: pivot never vanishes
      cp[i] = sup[i] * m[i];
    }
  }

  void solve(const std::vector<double>& rhs, std::vector<double>& x) const {
    const std::size_t n = rhs.size();
    x.resize(n);
    x[0] = rhs[0] * m[0];
    for (std::size_t i = 1; i < n; ++i)
      x[i] = (rhs[i] - sub[i] * x[i - 1]) * m[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
  }
};

// Periodic (cyclic) variant via the rank-one update: A = T + u v^T with the
// corner entries folded into u, v; T is factored once and the z = T^{-1} u
// solve is shared across time steps.
struct CyclicFactor {
  TriFactor tri;
  std::vector<double> z;
  double gamma = 0.0;
  double corner = 0.0;  // both corners equal (-c2)
  double vz_denom = 0.0;

  void factor(std::vector<double> sub, std::vector<double> diag,
              std::vector<double> sup, double corner_in) {
    const std::size_t n = diag.size();
    corner = corner_in;
    gamma = -diag[0];
    diag[0] -= gamma;
    diag[n - 1] -= corner * corner / gamma;
    tri.factor(sub, diag, sup);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = corner;
    tri.solve(u, z);
    vz_denom = 1.0 + z[0] + (corner / gamma) * z[n - 1];
  }

  void solve(const std::vector<double>& rhs, std::vector<double>& x) const {
    tri.solve(rhs, x);
    const std::size_t n = rhs.size();
    const double fact = (x[0] + (corner / gamma) * x[n - 1]) / vz_denom;
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  }
};

// Second difference with the solver's ghost-cell closures, divided by dx^2.
std::vector<double> second_difference(const Grid1D& grid,
                                      const std::vector<double>& v) {
  const std::size_t n = v.size();
  const double inv = 1.0 / (grid.dx() * grid.dx());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double left, right;
    if (i == 0) {
      switch (grid.boundary) {
        case BoundaryKind::Periodic: left = v[n - 1]; break;
        case BoundaryKind::Dirichlet0: left = -v[0]; break;
        default: left = v[0];
      }
    } else {
      left = v[i - 1];
    }
    if (i == n - 1) {
      switch (grid.boundary) {
        case BoundaryKind::Periodic: right = v[0]; break;
        case BoundaryKind::Dirichlet0: right = -v[n - 1]; break;
        default: right = v[n - 1];
      }
    } else {
      right = v[i + 1];
    }
    out[i] = (left - 2.0 * v[i] + right) * inv;
  }
  return out;
}

}  // namespace

const char* to_string(BoundaryKind b) {
  switch (b) {
    case BoundaryKind::Periodic: return "periodic";
    case BoundaryKind::Dirichlet0: return "dirichlet0";
    case BoundaryKind::Neumann0: return "neumann0";
  }
  return "?";
}

std::vector<double> Grid1D::centers() const {
  std::vector<double> xs(n_x);
  for (int i = 0; i < n_x; ++i) xs[i] = center(i);
  return xs;
}

std::vector<double> l1_weights(double alpha, std::size_t n, double dt) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("l1_weights: alpha must lie in (0,1)");
  if (n == 0) throw std::invalid_argument("l1_weights: n must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("l1_weights: dt must be positive");
  const double e = 1.0 - alpha;
  const double scale = 1.0 / (std::tgamma(2.0 - alpha) * std::pow(dt, alpha));
  std::vector<double> w(n);
  double prev = 0.0;  // 0^(1-alpha)
  for (std::size_t j = 0; j < n; ++j) {
    const double next = std::pow(static_cast<double>(j + 1), e);
    w[j] = (next - prev) * scale;
    prev = next;
  }
  return w;
}

double FieldSolution::interpolate(std::size_t n, double x) const {
  const double dx = grid.dx();
  const double pos = (x - grid.x_min) / dx - 0.5;
  const int nx = grid.n_x;
  const double fl = std::floor(pos);
  int i0 = static_cast<int>(fl);
  const double w = pos - fl;
  int i1 = i0 + 1;
  if (grid.boundary == BoundaryKind::Periodic) {
    i0 = ((i0 % nx) + nx) % nx;
    i1 = ((i1 % nx) + nx) % nx;
  } else {
    i0 = std::clamp(i0, 0, nx - 1);
    i1 = std::clamp(i1, 0, nx - 1);
  }
  return value(n, i0) * (1.0 - w) + value(n, i1) * w;
}

FieldSolution solve_fde(const AlphaField& field, const Grid1D& grid,
                        const std::vector<double>& initial, double t_final,
                        double dt) {
  check_grid(grid);
  return solve_fde_orders(field.orders_at(grid.centers()), grid, initial,
                          t_final, dt);
}

FieldSolution solve_fde_orders(std::vector<double> orders, const Grid1D& grid,
                               const std::vector<double>& initial,
                               double t_final, double dt) {
  check_grid(grid);
  const std::size_t nx = static_cast<std::size_t>(grid.n_x);
  if (initial.size() != nx)
    throw std::invalid_argument("solve_fde: initial data size must match the grid");
  if (orders.size() != nx)
    throw std::invalid_argument("solve_fde: orders size must match the grid");
  for (double a : orders)
    if (!(a > 0.0 && a < 1.0))
      throw std::domain_error("solve_fde: orders must lie in (0,1)");
  if (!(t_final > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("solve_fde: t_final and dt must be positive");

  const std::size_t n_steps =
      static_cast<std::size_t>(std::max<long long>(1, std::llround(t_final / dt)));
  const double dt_eff = t_final / static_cast<double>(n_steps);  // exact split

  FieldSolution sol;
  sol.grid = grid;
  sol.dt = dt_eff;
  sol.n_steps = n_steps;
  sol.orders = std::move(orders);
  sol.t_grid.resize(n_steps + 1);
  for (std::size_t n = 0; n <= n_steps; ++n)
    sol.t_grid[n] = dt_eff * static_cast<double>(n);
  sol.q.assign((n_steps + 1) * nx, 0.0);
  std::copy(initial.begin(), initial.end(), sol.q.begin());

  // Memory weight tables, shared between cells with the same order.
  std::unordered_map<std::uint64_t, std::vector<double>> tables;
  std::vector<const double*> weights(nx);
  std::vector<double> b0(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    std::uint64_t key;
    std::memcpy(&key, &sol.orders[i], sizeof key);
    auto [it, fresh] = tables.try_emplace(key);
    if (fresh) it->second = l1_weights(sol.orders[i], n_steps, dt_eff);
    weights[i] = it->second.data();
    b0[i] = it->second[0];
  }

  const double c2 = 1.0 / (2.0 * grid.dx() * grid.dx());
  std::vector<double> sub(nx, -c2), diag(nx), sup(nx, -c2);
  for (std::size_t i = 0; i < nx; ++i) diag[i] = b0[i] + 2.0 * c2;
  sub[0] = 0.0;
  sup[nx - 1] = 0.0;
  TriFactor tri;
  CyclicFactor cyc;
  switch (grid.boundary) {
    case BoundaryKind::Periodic:
      cyc.factor(sub, diag, sup, -c2);
      break;
    case BoundaryKind::Dirichlet0:
      diag[0] += c2;         // ghost = -q_0
      diag[nx - 1] += c2;
      tri.factor(sub, diag, sup);
      break;
    case BoundaryKind::Neumann0:
      diag[0] -= c2;         // ghost = q_0
      diag[nx - 1] -= c2;
      tri.factor(sub, diag, sup);
      break;
  }

  // point-major difference history: diffs[i*n_steps + (m-1)] = q^m_i - q^(m-1)_i
  std::vector<double> diffs(nx * n_steps, 0.0);
  std::vector<double> rhs(nx), x(nx);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double* q_prev = sol.row(n - 1);
    for (std::size_t i = 0; i < nx; ++i) {
      const double* w = weights[i];
      const double* d = diffs.data() + i * n_steps;
      double mem = 0.0;
      for (std::size_t j = 1; j < n; ++j) mem += w[j] * d[n - 1 - j];
      rhs[i] = b0[i] * q_prev[i] - mem;
    }
    if (grid.boundary == BoundaryKind::Periodic)
      cyc.solve(rhs, x);
    else
      tri.solve(rhs, x);
    double* q_new = sol.q.data() + n * nx;
    for (std::size_t i = 0; i < nx; ++i) {
      q_new[i] = x[i];
      diffs[i * n_steps + (n - 1)] = x[i] - q_prev[i];
    }
  }
  return sol;
}

double mild_residual(const FieldSolution& sol) {
  const std::size_t nx = static_cast<std::size_t>(sol.grid.n_x);
  const std::size_t N = sol.n_steps;
  const double T = sol.t_grid.back();
  const double dt = sol.dt;

  // time-trapezoid of q for the right-hand side
  std::vector<double> V(nx, 0.0);
  for (std::size_t n = 0; n <= N; ++n) {
    const double w = (n == 0 || n == N) ? 0.5 * dt : dt;
    const double* row = sol.row(n);
    for (std::size_t i = 0; i < nx; ++i) V[i] += w * row[i];
  }
  const std::vector<double> rhs = second_difference(sol.grid, V);

  double worst = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double a = sol.orders[i];
    const double ig = 1.0 / std::tgamma(1.0 - a);
    const double u0 = sol.value(0, i);
    // exact moments of (T-s)^(-a) against q piecewise linear in s
    double lhs = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const double tau0 = T - sol.t_grid[n];      // > 0
      const double tau1 = T - sol.t_grid[n + 1];  // >= 0
      const double p0 = std::pow(tau0, 1.0 - a);
      const double p1 = std::pow(tau1, 1.0 - a);
      const double m0 = (p0 - p1) / (1.0 - a);
      const double m1 =
          tau0 * m0 - (std::pow(tau0, 2.0 - a) - std::pow(tau1, 2.0 - a)) / (2.0 - a);
      const double qa = sol.value(n, i);
      const double qb = sol.value(n + 1, i);
      lhs += (qa - u0) * m0 + (qb - qa) / dt * m1;
    }
    worst = std::max(worst, std::fabs(lhs * ig - 0.5 * rhs[i]));
  }
  return worst;
}

McPdeReport compare_mc_pde(const AlphaField& field, const Grid1D& grid,
                           const std::function<double(double)>& u0,
                           double t_final, double pde_dt, const SimConfig& sim_cfg,
                           const std::vector<double>& start_points,
                           std::size_t n_paths, std::uint64_t base_seed,
                           double rel_tol, int threads) {
  if (start_points.empty())
    throw std::invalid_argument("compare_mc_pde: need at least one start point");
  if (n_paths < 2)
    throw std::invalid_argument("compare_mc_pde: need at least two paths");

  std::vector<double> init(grid.n_x);
  for (int i = 0; i < grid.n_x; ++i) init[i] = u0(grid.center(i));
  const FieldSolution sol = solve_fde(field, grid, init, t_final, pde_dt);

  McPdeReport rep;
  rep.paths_per_point = n_paths;
  const std::vector<double> obs_grid{t_final};
  for (std::size_t r = 0; r < start_points.size(); ++r) {
    SimConfig cfg = sim_cfg;
    cfg.x0 = start_points[r];
    cfg.target_external_time = t_final;

    std::vector<double> vals(n_paths,
                             std::numeric_limits<double>::quiet_NaN());
    const int tn = std::max(1, threads);
    std::vector<std::thread> pool;
    const std::size_t block = (n_paths + tn - 1) / tn;
    auto worker = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        RandomStream rs(base_seed, r * n_paths + i);
        StreamedPath sp = simulate_streaming(field, cfg, rs, obs_grid);
        if (sp.status == PathStatus::Complete)
          vals[i] = u0(sp.sample.positions[0]);
      }
    };
    if (tn == 1) {
      worker(0, n_paths);
    } else {
      for (int w = 0; w < tn; ++w) {
        const std::size_t lo = std::min(n_paths, w * block);
        const std::size_t hi = std::min(n_paths, lo + block);
        if (lo < hi) pool.emplace_back(worker, lo, hi);
      }
      for (auto& th : pool) th.join();
    }

    std::vector<double> good;
    good.reserve(n_paths);
    for (double v : vals)
      if (!std::isnan(v)) good.push_back(v);
    const std::size_t bad = n_paths - good.size();
    rep.incomplete_paths += bad;
    if (static_cast<double>(bad) > 0.10 * static_cast<double>(n_paths))
      throw EnsembleError("compare_mc_pde: too many incomplete paths at x0=" +
                          std::to_string(cfg.x0));

    std::sort(good.begin(), good.end());
    double mean = 0.0;
    for (double v : good) mean += v;
    mean /= static_cast<double>(good.size());
    double ss = 0.0;
    for (double v : good) ss += (v - mean) * (v - mean);
    const double se =
        std::sqrt(ss / (good.size() - 1.0)) / std::sqrt(static_cast<double>(good.size()));

    McPdePoint pt;
    pt.x0 = cfg.x0;
    pt.mc_mean = mean;
    pt.mc_se = se;
    pt.pde_value = sol.interpolate(sol.n_steps, cfg.x0);
    pt.diff = std::fabs(pt.mc_mean - pt.pde_value);
    pt.tolerance = std::max(3.0 * se, rel_tol * std::fabs(pt.pde_value));
    pt.pass = pt.diff <= pt.tolerance;
    rep.max_abs_diff = std::max(rep.max_abs_diff, pt.diff);
    rep.points.push_back(pt);
  }
  rep.pass = std::all_of(rep.points.begin(), rep.points.end(),
                         [](const McPdePoint& p) { return p.pass; });
  return rep;
}

namespace {

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

constexpr char kMagic[4] = {'V', 'A', 'Q', 'D'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_solution_csv(const FieldSolution& sol, std::ostream& os,
                        std::size_t time_stride) {
  if (time_stride == 0) time_stride = 1;
  os << "t,x,q\n";
  char buf[96];
  for (std::size_t n = 0; n <= sol.n_steps; n += time_stride) {
    for (int i = 0; i < sol.grid.n_x; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", sol.t_grid[n],
                    sol.grid.center(i), sol.value(n, i));
      os << buf;
    }
  }
}

void write_solution_dump(const FieldSolution& sol, std::uint64_t field_hash,
                         std::ostream& os) {
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, field_hash);
  put(os, sol.dt);
  put(os, sol.grid.x_min);
  put(os, sol.grid.x_max);
  put(os, static_cast<std::uint32_t>(sol.grid.n_x));
  put(os, static_cast<std::uint32_t>(sol.grid.boundary));
  put(os, static_cast<std::uint64_t>(sol.n_steps + 1));
  os.write(reinterpret_cast<const char*>(sol.q.data()),
           static_cast<std::streamsize>(sol.q.size() * sizeof(double)));
}

FieldSolution read_solution_dump(std::istream& is, std::uint64_t* field_hash_out) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("solution dump: bad magic");
  if (get<std::uint32_t>(is) != kVersion)
    throw std::runtime_error("solution dump: unsupported version");
  const std::uint64_t fh = get<std::uint64_t>(is);
  if (field_hash_out) *field_hash_out = fh;
  FieldSolution sol;
  sol.dt = get<double>(is);
  sol.grid.x_min = get<double>(is);
  sol.grid.x_max = get<double>(is);
  sol.grid.n_x = static_cast<int>(get<std::uint32_t>(is));
  sol.grid.boundary = static_cast<BoundaryKind>(get<std::uint32_t>(is));
  const std::uint64_t rows = get<std::uint64_t>(is);
  sol.n_steps = rows - 1;
  sol.t_grid.resize(rows);
  for (std::uint64_t n = 0; n < rows; ++n) sol.t_grid[n] = sol.dt * n;
  sol.q.resize(rows * sol.grid.n_x);
  is.read(reinterpret_cast<char*>(sol.q.data()),
          static_cast<std::streamsize>(sol.q.size() * sizeof(double)));
  if (!is) throw std::runtime_error("solution dump: truncated stream");
  return sol;
}

}  // namespace varalpha
