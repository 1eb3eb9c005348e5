#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "varalpha/alpha_field.hpp"
#include "varalpha/sim.hpp"

namespace varalpha {

struct EnsembleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Path i uses RandomStream(base_seed, stream_offset + i): the stream
// assignment is by path index, so results do not depend on scheduling.
struct EnsembleOptions {
  std::size_t n_paths = 100;
  std::uint64_t base_seed = 1;
  std::uint64_t stream_offset = 0;
  int threads = 1;  // <=1 serial
  // Abort (throw EnsembleError) when more than this fraction of paths fails
  // to reach the target; a few truncated paths are excluded and counted.
  double max_incomplete_fraction = 0.10;
};

// Cross-path aggregates on an external time grid. Confidence intervals are
// 95% normal (occupation: t-free sample sd; hit: binomial). A single path
// yields +inf halfwidths rather than a fake zero.
struct EnsembleSummary {
  std::vector<double> t_grid;
  std::vector<double> occ_mean;
  std::vector<double> occ_ci_halfwidth;
  std::vector<double> hit_prob;
  std::vector<double> hit_ci_halfwidth;
  std::size_t n_paths = 0;
  std::size_t n_complete = 0;
  std::size_t n_incomplete = 0;
};

// Occupation fraction of `target` (exact external-time coverage from the
// streaming clock decomposition) and hit indicator at every grid time,
// averaged across an ensemble. Aggregation sums sorted per-path values, so
// the result is bit-identical under any path ordering or thread count.
EnsembleSummary run_ensemble(const AlphaField& field, const SimConfig& cfg,
                             const EnsembleOptions& opts,
                             const IntervalUnion& target,
                             const std::vector<double>& t_grid);

// Ensemble of internal-time growth records: occupation of `split_set`,
// clock contribution accumulated inside it (sigma1) and outside (sigma2),
// sampled when internal time reaches each grid value. Paths that exhaust the
// step budget before the horizon count as incomplete.
std::vector<GrowthSeries> run_growth_ensemble(const AlphaField& field,
                                              const SimConfig& cfg,
                                              const EnsembleOptions& opts,
                                              const IntervalUnion& split_set,
                                              const std::vector<double>& internal_grid);

enum class GrowthQuantity { Occupation, Sigma1, Sigma2 };

const char* to_string(GrowthQuantity q);

struct SlopeFit {
  GrowthQuantity quantity = GrowthQuantity::Occupation;
  double slope = 0.0;
  double slope_stderr = 0.0;
  std::size_t n_paths_used = 0;
  std::vector<double> log10_t;       // fit abscissae
  std::vector<double> mean_log10_q;  // cross-path mean ordinate
};

// Per-path least-squares slope of log10(q) against log10(t), averaged across
// paths (or the median with `use_median`). Requires the grid to span at
// least two decades with at least 10 points (InsufficientRange otherwise);
// points with q = 0 are dropped per path.
SlopeFit fit_growth_exponent(const std::vector<GrowthSeries>& series,
                             GrowthQuantity quantity, bool use_median = false);

enum class Verdict { Consistent, Inconsistent, Inconclusive };

const char* to_string(Verdict v);

struct RegimeOptions {
  double beta = 0.05;            // sublevel offset when the minimum is not a jump
  double big_k = 10.0;           // delocalized runs watch target u [-K, K]
  double localize_threshold = 0.8;
  double delocalize_threshold = 0.2;
  double ci_max_halfwidth = 0.1;  // wider final CI -> Inconclusive
  int points_per_decade = 6;
  int n_decades = 4;             // grid spans [target/10^n, target]
};

struct RegimeReport {
  RegimePrediction prediction;
  IntervalUnion watched_set;
  EnsembleSummary summary;
  std::vector<double> decade_times;
  std::vector<double> decade_occ;
  bool trend_ok = false;
  double occ_final = 0.0;
  double occ_final_ci = 0.0;
  double hit_final = 0.0;
  double hit_final_ci = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

// Classifies the field, runs the matching ensemble and checks the predicted
// trend: localization wants the watched occupation increasing across the
// last decades and ending above localize_threshold (probability localization
// additionally wants the hit probability there); delocalization wants the
// occupation of target u [-K,K] decreasing and ending below
// delocalize_threshold. Refuses Critical fields.
RegimeReport verify_regime(const AlphaField& field, const SimConfig& cfg,
                           const EnsembleOptions& eopts,
                           const RegimeOptions& ropts = {});

struct KsResult {
  double d = 0.0;
  double p_value = 0.0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic p-value (small-sample
// corrected argument).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Geometric grid t_max * 10^(-k/ppd), k = n_decades*ppd .. 0, ascending;
// exact decade multiples are grid members.
std::vector<double> geometric_grid(double t_max, int n_decades, int points_per_decade);

}  // namespace varalpha
