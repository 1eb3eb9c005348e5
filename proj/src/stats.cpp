#include "varalpha/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace varalpha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

template <class Fn>
void parallel_for_paths(std::size_t n, int threads, Fn fn) {
  const int t = std::max(1, threads);
  if (t == 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
  const std::size_t block = (n + t - 1) / t;
  for (int w = 0; w < t; ++w) {
    const std::size_t lo = std::min(n, w * block);
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([=, &errors] {
      try {
        fn(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Sum in ascending value order: independent of how paths were scheduled.
double sorted_sum(std::vector<double>& scratch) {
  std::sort(scratch.begin(), scratch.end());
  double s = 0.0;
  for (double v : scratch) s += v;
  return s;
}

void check_positive_grid(const std::vector<double>& g) {
  if (g.empty()) throw std::invalid_argument("ensemble: empty time grid");
  if (!(g.front() > 0.0))
    throw std::invalid_argument("ensemble: grid times must be positive");
  if (!std::is_sorted(g.begin(), g.end()))
    throw std::invalid_argument("ensemble: grid must be ascending");
}

}  // namespace

std::vector<double> geometric_grid(double t_max, int n_decades,
                                   int points_per_decade) {
  if (!(t_max > 0.0) || n_decades < 1 || points_per_decade < 1)
    throw std::invalid_argument("geometric_grid: bad parameters");
  const int n = n_decades * points_per_decade;
  std::vector<double> g(n + 1);
  for (int k = 0; k <= n; ++k)
    g[k] = t_max * std::pow(10.0, static_cast<double>(k - n) / points_per_decade);
  g[n] = t_max;  // exact
  return g;
}

EnsembleSummary run_ensemble(const AlphaField& field, const SimConfig& cfg,
                             const EnsembleOptions& opts,
                             const IntervalUnion& target,
                             const std::vector<double>& t_grid) {
  if (opts.n_paths == 0) throw std::invalid_argument("ensemble: n_paths must be > 0");
  check_positive_grid(t_grid);

  const std::size_t n = opts.n_paths;
  const std::size_t m = t_grid.size();
  std::vector<double> occ(n * m, kNan);
  std::vector<std::uint8_t> hit(n * m, 0);
  std::vector<std::uint8_t> complete(n, 0);

  parallel_for_paths(n, opts.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RandomStream rs(opts.base_seed, opts.stream_offset + i);
      // streaming with the target as split set yields the exact time spent
      // in the target at every grid point, free of quadrature error
      StreamedPath sp = simulate_streaming(field, cfg, rs, t_grid, &target);
      if (sp.status != PathStatus::Complete) continue;
      complete[i] = 1;
      for (std::size_t j = 0; j < m; ++j) {
        occ[i * m + j] = sp.split_coverage[j] / t_grid[j];
        hit[i * m + j] = target.contains(sp.sample.positions[j]) ? 1 : 0;
      }
    }
  });

  EnsembleSummary out;
  out.t_grid = t_grid;
  out.n_paths = n;
  for (std::size_t i = 0; i < n; ++i) out.n_complete += complete[i];
  out.n_incomplete = n - out.n_complete;
  if (out.n_complete == 0)
    throw EnsembleError("ensemble: no path reached the target");
  if (static_cast<double>(out.n_incomplete) >
      opts.max_incomplete_fraction * static_cast<double>(n))
    throw EnsembleError("ensemble: " + std::to_string(out.n_incomplete) + " of " +
                        std::to_string(n) +
                        " paths incomplete; raise max_steps or overflow_cap");

  const double nc = static_cast<double>(out.n_complete);
  out.occ_mean.resize(m);
  out.occ_ci_halfwidth.resize(m);
  out.hit_prob.resize(m);
  out.hit_ci_halfwidth.resize(m);
  std::vector<double> scratch;
  scratch.reserve(out.n_complete);
  for (std::size_t j = 0; j < m; ++j) {
    scratch.clear();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!complete[i]) continue;
      scratch.push_back(occ[i * m + j]);
      hits += hit[i * m + j];
    }
    const double mean = sorted_sum(scratch) / nc;  // scratch now sorted
    out.occ_mean[j] = mean;
    if (out.n_complete > 1) {
      double ss = 0.0;
      for (double v : scratch) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / (nc - 1.0));
      out.occ_ci_halfwidth[j] = 1.96 * sd / std::sqrt(nc);
    } else {
      out.occ_ci_halfwidth[j] = kInf;
    }
    const double p = static_cast<double>(hits) / nc;
    out.hit_prob[j] = p;
    out.hit_ci_halfwidth[j] =
        out.n_complete > 1 ? 1.96 * std::sqrt(p * (1.0 - p) / nc) : kInf;
  }
  return out;
}

std::vector<GrowthSeries> run_growth_ensemble(const AlphaField& field,
                                              const SimConfig& cfg,
                                              const EnsembleOptions& opts,
                                              const IntervalUnion& split_set,
                                              const std::vector<double>& internal_grid) {
  if (opts.n_paths == 0) throw std::invalid_argument("ensemble: n_paths must be > 0");
  check_positive_grid(internal_grid);
  if (!(cfg.target_internal_time > 0.0) ||
      internal_grid.back() > cfg.target_internal_time)
    throw std::invalid_argument(
        "growth ensemble: needs target_internal_time >= grid back");

  const std::size_t n = opts.n_paths;
  std::vector<GrowthSeries> series(n);
  std::vector<std::uint8_t> complete(n, 0);
  parallel_for_paths(n, opts.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RandomStream rs(opts.base_seed, opts.stream_offset + i);
      StreamedPath sp =
          simulate_streaming(field, cfg, rs, {}, &split_set, &internal_grid);
      if (sp.status == PathStatus::Complete &&
          sp.growth.t.size() == internal_grid.size()) {
        complete[i] = 1;
        series[i] = std::move(sp.growth);
      }
    }
  });

  std::vector<GrowthSeries> out;
  out.reserve(n);
  std::size_t incomplete = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (complete[i])
      out.push_back(std::move(series[i]));
    else
      ++incomplete;
  }
  if (out.empty()) throw EnsembleError("growth ensemble: no path reached the horizon");
  if (static_cast<double>(incomplete) >
      opts.max_incomplete_fraction * static_cast<double>(n))
    throw EnsembleError("growth ensemble: " + std::to_string(incomplete) + " of " +
                        std::to_string(n) + " paths incomplete");
  return out;
}

const char* to_string(GrowthQuantity q) {
  switch (q) {
    case GrowthQuantity::Occupation: return "occupation";
    case GrowthQuantity::Sigma1: return "sigma1";
    case GrowthQuantity::Sigma2: return "sigma2";
  }
  return "?";
}

SlopeFit fit_growth_exponent(const std::vector<GrowthSeries>& series,
                             GrowthQuantity quantity, bool use_median) {
  if (series.empty()) throw std::invalid_argument("fit: no series");
  const auto& t = series.front().t;
  if (t.size() < 10 || !(std::log10(t.back() / t.front()) >= 2.0 - 1e-12))
    throw InsufficientRange(
        "fit: need at least 10 grid points spanning at least two decades");

  SlopeFit fit;
  fit.quantity = quantity;
  fit.log10_t.reserve(t.size());
  for (double v : t) fit.log10_t.push_back(std::log10(v));

  auto values_of = [quantity](const GrowthSeries& g) -> const std::vector<double>& {
    switch (quantity) {
      case GrowthQuantity::Occupation: return g.occupation;
      case GrowthQuantity::Sigma1: return g.sigma1;
      default: return g.sigma2;
    }
  };

  std::vector<double> slopes;
  std::vector<double> sum_log_q(t.size(), 0.0);
  std::vector<std::size_t> cnt_log_q(t.size(), 0);
  for (const auto& g : series) {
    const auto& q = values_of(g);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t np = 0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (!(q[j] > 0.0)) continue;  // not entered yet: no log value
      const double x = fit.log10_t[j];
      const double y = std::log10(q[j]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++np;
      sum_log_q[j] += y;
      ++cnt_log_q[j];
    }
    if (np < 10) continue;  // too little signal on this path
    const double denom = np * sxx - sx * sx;
    if (denom <= 0.0) continue;
    slopes.push_back((np * sxy - sx * sy) / denom);
  }
  if (slopes.empty()) throw InsufficientRange("fit: no path had enough positive values");

  fit.n_paths_used = slopes.size();
  std::sort(slopes.begin(), slopes.end());
  double mean = 0.0;
  for (double s : slopes) mean += s;
  mean /= slopes.size();
  if (use_median) {
    const std::size_t h = slopes.size() / 2;
    fit.slope = slopes.size() % 2 ? slopes[h] : 0.5 * (slopes[h - 1] + slopes[h]);
  } else {
    fit.slope = mean;
  }
  if (slopes.size() > 1) {
    double ss = 0.0;
    for (double s : slopes) ss += (s - mean) * (s - mean);
    fit.slope_stderr = std::sqrt(ss / (slopes.size() - 1.0)) /
                       std::sqrt(static_cast<double>(slopes.size()));
  } else {
    fit.slope_stderr = kInf;
  }
  fit.mean_log10_q.resize(t.size(), kNan);
  for (std::size_t j = 0; j < t.size(); ++j)
    if (cnt_log_q[j] > 0) fit.mean_log10_q[j] = sum_log_q[j] / cnt_log_q[j];
  return fit;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "Consistent";
    case Verdict::Inconsistent: return "Inconsistent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

RegimeReport verify_regime(const AlphaField& field, const SimConfig& cfg,
                           const EnsembleOptions& eopts,
                           const RegimeOptions& ropts) {
  RegimeReport rep;
  rep.prediction = classify_regime(field.structure());
  if (rep.prediction.kind == RegimeKind::Critical)
    throw std::invalid_argument("verify_regime: field sits on the critical line");

  const auto& st = field.structure();
  IntervalUnion base =
      st.min_attained_by_jump ? st.argmin_set : field.level_set(ropts.beta);
  if (rep.prediction.kind == RegimeKind::Delocalize) {
    IntervalUnion window;
    window.add(-ropts.big_k, ropts.big_k);
    rep.watched_set = base.unite(window);
  } else {
    rep.watched_set = base;
  }

  const auto grid = geometric_grid(cfg.target_external_time, ropts.n_decades,
                                   ropts.points_per_decade);
  rep.summary = run_ensemble(field, cfg, eopts, rep.watched_set, grid);

  const int marks = std::min(3, ropts.n_decades);
  for (int d = marks; d >= 0; --d) {
    const std::size_t idx = grid.size() - 1 -
                            static_cast<std::size_t>(d) * ropts.points_per_decade;
    rep.decade_times.push_back(grid[idx]);
    rep.decade_occ.push_back(rep.summary.occ_mean[idx]);
  }
  const bool localizing = rep.prediction.kind != RegimeKind::Delocalize;
  rep.trend_ok = true;
  for (std::size_t i = 1; i < rep.decade_occ.size(); ++i) {
    const bool up = rep.decade_occ[i] > rep.decade_occ[i - 1];
    if (localizing != up) rep.trend_ok = false;
  }
  rep.occ_final = rep.summary.occ_mean.back();
  rep.occ_final_ci = rep.summary.occ_ci_halfwidth.back();
  rep.hit_final = rep.summary.hit_prob.back();
  rep.hit_final_ci = rep.summary.hit_ci_halfwidth.back();

  const bool need_hit = rep.prediction.kind == RegimeKind::LocalizeProbability;
  if (!(rep.occ_final_ci <= ropts.ci_max_halfwidth) ||
      (need_hit && !(rep.hit_final_ci <= ropts.ci_max_halfwidth))) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  bool ok = rep.trend_ok;
  if (localizing) {
    ok = ok && rep.occ_final > ropts.localize_threshold;
    if (need_hit) ok = ok && rep.hit_final > ropts.localize_threshold;
  } else {
    ok = ok && rep.occ_final < ropts.delocalize_threshold;
  }
  rep.verdict = ok ? Verdict::Consistent : Verdict::Inconsistent;
  return rep;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    const double v = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= v) ++ia;
    while (ib < b.size() && b[ib] <= v) ++ib;
    d = std::max(d, std::fabs(ia / na - ib / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  double sign = 1.0;
  bool converged = false;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lam * lam);
    p += 2.0 * sign * term;
    sign = -sign;
    if (term < 1e-16) {
      converged = true;
      break;
    }
  }
  // The alternating series only terminates for lam large enough; when it
  // does not, lam <= 0.05 and the tail probability is 1 to double precision.
  if (!converged) p = 1.0;
  KsResult r;
  r.d = d;
  r.p_value = std::clamp(p, 0.0, 1.0);
  return r;
}

}  // namespace varalpha
