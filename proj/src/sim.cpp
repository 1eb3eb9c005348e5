#include "varalpha/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

namespace varalpha {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
    throw std::invalid_argument("sim: dt must be positive and finite");
  if (!(cfg.target_external_time > 0.0))
    throw std::invalid_argument("sim: target_external_time must be positive");
  if (cfg.target_internal_time < 0.0)
    throw std::invalid_argument("sim: target_internal_time must be >= 0");
  if (cfg.max_steps == 0)
    throw std::invalid_argument("sim: max_steps must be positive");
  if (!(cfg.overflow_cap > 0.0))
    throw std::invalid_argument("sim: overflow_cap must be positive");
}

// Shared stepping core. on_step(s_new, b_left, b_new, sigma_old, sigma_new)
// runs after the accumulators are updated for the step. Draw order per step
// is fixed (stable jump first, then the gaussian move), so stored and
// streamed runs consume the same stream identically.
template <class OnStep>
PathStatus run_core(const AlphaField& field, const SimConfig& cfg,
                    RandomStream& rs, const IntervalUnion* split_set,
                    const std::vector<NamedSet>& occupied_sets,
                    double& sigma1, double& sigma2, double& split_occ,
                    std::vector<std::pair<std::string, double>>& occupation,
                    double& s_final, double& b_final, double& sigma_final,
                    OnStep&& on_step) {
  check_config(cfg);
  occupation.clear();
  for (const auto& ns : occupied_sets) occupation.emplace_back(ns.name, 0.0);
  sigma1 = sigma2 = split_occ = 0.0;

  const double sqrt_dt = std::sqrt(cfg.dt);
  const double log_dt = std::log(cfg.dt);
  double s = 0.0, b = cfg.x0, sig = 0.0;
  PathStatus status = PathStatus::StepBudgetExhausted;

  for (std::uint64_t k = 0; k < cfg.max_steps; ++k) {
    if (sig > cfg.target_external_time ||
        (cfg.target_internal_time > 0.0 && s >= cfg.target_internal_time)) {
      status = PathStatus::Complete;
      break;
    }
    const double a = field(b);
    const double log_v = log_dt / a + log_sample_positive_stable(a, rs);
    const double jump = log_v >= 709.0 ? kInf : std::exp(log_v);
    const double sig_new = sig + jump;
    if (!(sig_new <= cfg.overflow_cap)) {  // catches inf as well
      status = PathStatus::TimeOverflow;
      break;
    }
    const bool in_split = split_set != nullptr && split_set->contains(b);
    if (in_split) {
      sigma1 += jump;
      split_occ += cfg.dt;
    } else {
      sigma2 += jump;
    }
    for (std::size_t i = 0; i < occupation.size(); ++i)
      if (occupied_sets[i].set.contains(b)) occupation[i].second += cfg.dt;

    const double b_new = b + sqrt_dt * rs.gaussian();
    const double s_new = s + cfg.dt;
    on_step(s_new, b, b_new, sig, sig_new);
    s = s_new;
    b = b_new;
    sig = sig_new;
  }
  if (status == PathStatus::StepBudgetExhausted &&
      (sig > cfg.target_external_time ||
       (cfg.target_internal_time > 0.0 && s >= cfg.target_internal_time)))
    status = PathStatus::Complete;  // budget boundary coincided with the target

  s_final = s;
  b_final = b;
  sigma_final = sig;
  return status;
}

}  // namespace

const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Complete: return "complete";
    case PathStatus::StepBudgetExhausted: return "step_budget_exhausted";
    case PathStatus::TimeOverflow: return "time_overflow";
  }
  return "?";
}

CoupledPath simulate_coupled(const AlphaField& field, const SimConfig& cfg,
                             RandomStream& rs, const IntervalUnion* split_set,
                             const std::vector<NamedSet>& occupied_sets) {
  CoupledPath path;
  path.steps.push_back({0.0, cfg.x0, 0.0});
  double sf, bf, sgf;
  path.status = run_core(
      field, cfg, rs, split_set, occupied_sets, path.sigma1, path.sigma2,
      path.split_occupation, path.occupation, sf, bf, sgf,
      [&](double s_new, double /*b_left*/, double b_new, double /*sig_old*/,
          double sig_new) { path.steps.push_back({s_new, b_new, sig_new}); });
  return path;
}

TimeChangedSample invert_time_change(const CoupledPath& path,
                                     const std::vector<double>& external_times) {
  if (external_times.empty())
    throw std::invalid_argument("invert_time_change: empty external grid");
  if (!std::is_sorted(external_times.begin(), external_times.end()))
    throw std::invalid_argument("invert_time_change: external grid must be ascending");
  if (external_times.front() < 0.0)
    throw std::invalid_argument("invert_time_change: external times must be >= 0");
  if (external_times.back() >= path.final_sigma())
    throw PathTooShort("invert_time_change: grid reaches beyond the path's final clock value");

  TimeChangedSample out;
  out.external_times = external_times;
  const std::size_t m = external_times.size();
  out.positions.resize(m);
  out.l_values.resize(m);
  out.g_values.resize(m);
  out.h_values.resize(m);
  out.ages.resize(m);

  const auto& st = path.steps;
  std::size_t k = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double t = external_times[j];
    while (st[k].sigma <= t) ++k;  // first clock value strictly above t
    // The holding interval [sigma_{k-1}, sigma_k) was generated while the
    // walker sat at the pre-move position st[k-1].b; that position also owns
    // the sigma1/sigma2 attribution, so using it here keeps
    // occupation_fraction equal to the clock's split coverage exactly.
    out.positions[j] = st[k - 1].b;
    out.l_values[j] = st[k].s;
    out.g_values[j] = st[k - 1].sigma;
    out.h_values[j] = st[k].sigma;
    // age: time since the observed value last changed; coalesce runs of
    // equal positions (zero-probability event for Brownian moves, but the
    // stored path makes it checkable)
    std::size_t k0 = k - 1;
    while (k0 > 0 && st[k0 - 1].b == st[k - 1].b) --k0;
    out.ages[j] = t - st[k0].sigma;
  }
  return out;
}

double occupation_fraction(const TimeChangedSample& sample,
                           const IntervalUnion& set, double t) {
  const auto& tg = sample.external_times;
  if (tg.empty()) throw std::invalid_argument("occupation_fraction: empty sample");
  if (!(t > 0.0) || t > tg.back())
    throw std::invalid_argument("occupation_fraction: t must lie in (0, grid back]");

  double acc = 0.0;
  // initial sliver up to the first grid point
  if (tg.front() > 0.0 && set.contains(sample.positions.front()))
    acc += std::min(t, tg.front());
  for (std::size_t j = 0; j + 1 < tg.size() && tg[j] < t; ++j) {
    const double w = std::min(tg[j + 1], t) - tg[j];
    if (w > 0.0 && set.contains(sample.positions[j])) acc += w;
  }
  return acc / t;
}

double occupation_fraction(const CoupledPath& path, const IntervalUnion& set,
                           double t) {
  const auto& st = path.steps;
  if (st.size() < 2)
    throw std::invalid_argument("occupation_fraction: path has no steps");
  if (!(t > 0.0) || t > path.final_sigma())
    throw std::invalid_argument(
        "occupation_fraction: t must lie in (0, final clock value]");

  double acc = 0.0;
  for (std::size_t k = 1; k < st.size() && st[k - 1].sigma < t; ++k)
    if (set.contains(st[k - 1].b))
      acc += std::min(st[k].sigma, t) - st[k - 1].sigma;
  return acc / t;
}

StreamedPath simulate_streaming(const AlphaField& field, const SimConfig& cfg,
                                RandomStream& rs,
                                const std::vector<double>& external_times,
                                const IntervalUnion* split_set,
                                const std::vector<double>* internal_grid) {
  if (!external_times.empty()) {
    if (!std::is_sorted(external_times.begin(), external_times.end()))
      throw std::invalid_argument("simulate_streaming: external grid must be ascending");
    if (external_times.front() < 0.0)
      throw std::invalid_argument("simulate_streaming: external times must be >= 0");
    if (external_times.back() > cfg.target_external_time)
      throw std::invalid_argument(
          "simulate_streaming: external grid must not exceed target_external_time");
  }
  if (internal_grid && !std::is_sorted(internal_grid->begin(), internal_grid->end()))
    throw std::invalid_argument("simulate_streaming: internal grid must be ascending");

  StreamedPath out;
  auto& smp = out.sample;
  smp.external_times = external_times;
  const std::size_t m = external_times.size();
  smp.positions.assign(m, kNan);
  smp.l_values.assign(m, kNan);
  smp.g_values.assign(m, kNan);
  smp.h_values.assign(m, kNan);
  smp.ages.assign(m, kNan);
  out.split_coverage.assign(m, kNan);

  std::size_t j = 0;        // next external grid index to resolve
  std::size_t gi = 0;       // next internal grid index to record
  double coverage = 0.0;    // split-set time within completed holding intervals
  std::vector<std::pair<std::string, double>> occ_unused;
  double b_final_unused = 0.0;

  out.status = run_core(
      field, cfg, rs, split_set, {}, out.sigma1, out.sigma2,
      out.split_occupation, occ_unused, out.final_internal_time,
      b_final_unused, out.final_sigma,
      [&](double s_new, double b_left, double /*b_new*/, double sig_old,
          double sig_new) {
        const bool owner_in_split =
            split_set != nullptr && split_set->contains(b_left);
        while (j < m && external_times[j] < sig_new) {
          // sig_old <= t_j < sig_new: the walker holds at b_left (the
          // position that generated this jump) throughout the interval
          smp.positions[j] = b_left;
          smp.l_values[j] = s_new;
          smp.g_values[j] = sig_old;
          smp.h_values[j] = sig_new;
          smp.ages[j] = external_times[j] - sig_old;
          if (split_set != nullptr)
            out.split_coverage[j] =
                coverage +
                (owner_in_split ? external_times[j] - sig_old : 0.0);
          ++j;
        }
        if (owner_in_split) coverage += sig_new - sig_old;
        if (internal_grid) {
          while (gi < internal_grid->size() && s_new >= (*internal_grid)[gi]) {
            out.growth.t.push_back((*internal_grid)[gi]);
            out.growth.occupation.push_back(out.split_occupation);
            out.growth.sigma1.push_back(out.sigma1);
            out.growth.sigma2.push_back(out.sigma2);
            ++gi;
          }
        }
      });
  return out;
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

constexpr char kMagic[4] = {'V', 'A', 'P', 'D'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_path_dump(const CoupledPath& path, double dt,
                     std::uint64_t field_hash, std::ostream& os) {
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, field_hash);
  put(os, dt);
  put(os, static_cast<std::uint8_t>(path.status));
  put(os, path.sigma1);
  put(os, path.sigma2);
  put(os, path.split_occupation);
  put(os, static_cast<std::uint64_t>(path.steps.size()));
  for (const auto& st : path.steps) {
    put(os, st.s);
    put(os, st.b);
    put(os, st.sigma);
  }
}

CoupledPath read_path_dump(std::istream& is, double* dt_out,
                           std::uint64_t* field_hash_out) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("path dump: bad magic");
  if (get<std::uint32_t>(is) != kVersion)
    throw std::runtime_error("path dump: unsupported version");
  const std::uint64_t fh = get<std::uint64_t>(is);
  const double dt = get<double>(is);
  if (field_hash_out) *field_hash_out = fh;
  if (dt_out) *dt_out = dt;

  CoupledPath path;
  path.status = static_cast<PathStatus>(get<std::uint8_t>(is));
  path.sigma1 = get<double>(is);
  path.sigma2 = get<double>(is);
  path.split_occupation = get<double>(is);
  const std::uint64_t n = get<std::uint64_t>(is);
  path.steps.resize(n);
  for (auto& st : path.steps) {
    st.s = get<double>(is);
    st.b = get<double>(is);
    st.sigma = get<double>(is);
  }
  if (!is) throw std::runtime_error("path dump: truncated stream");
  return path;
}

}  // namespace varalpha
