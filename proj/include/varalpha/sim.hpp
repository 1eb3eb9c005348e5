#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "varalpha/alpha_field.hpp"
#include "varalpha/intervals.hpp"
#include "varalpha/rng.hpp"

namespace varalpha {

// Euler stepping of the pair (B, sigma): per internal step of size dt the
// position moves by sqrt(dt)*N(0,1) and the clock sigma jumps by
// dt^(1/alpha(b)) * S with S one-sided stable of order alpha(b), the order
// frozen at the position before the move. Within a region of constant order
// the clock increments have exactly the infinitely divisible law of the
// subordinator, so dt only controls how finely the order field is resolved.
struct SimConfig {
  double dt = 1e-2;
  double x0 = 0.0;
  // Run until the clock strictly exceeds this external time (so inversion is
  // defined on [0, target]).
  double target_external_time = 1.0;
  // Optional alternative stop: halt once internal time reaches this horizon
  // (0 = disabled). Used by growth-law runs that live on the internal scale.
  double target_internal_time = 0.0;
  std::uint64_t max_steps = 50'000'000;
  // Truncate the path once sigma would exceed this cap; keeps later log-space
  // processing finite.
  double overflow_cap = 1e300;
};

enum class PathStatus : std::uint8_t {
  Complete = 0,
  StepBudgetExhausted = 1,
  TimeOverflow = 2,
};

const char* to_string(PathStatus s);

struct PathStep {
  double s = 0.0;      // internal time
  double b = 0.0;      // position
  double sigma = 0.0;  // clock value
};

struct NamedSet {
  std::string name;
  IntervalUnion set;
};

// Fully stored internal path. steps[0] = (0, x0, 0); steps[k].sigma was
// reached by a jump drawn at position steps[k-1].b. sigma1 collects the jumps
// made while the position lay in the split set, sigma2 the rest;
// split_occupation is the internal time spent in the split set (left
// endpoints), and occupation[] the same for any extra named sets.
struct CoupledPath {
  std::vector<PathStep> steps;
  PathStatus status = PathStatus::Complete;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double split_occupation = 0.0;
  std::vector<std::pair<std::string, double>> occupation;

  double final_internal_time() const { return steps.back().s; }
  double final_sigma() const { return steps.back().sigma; }
};

CoupledPath simulate_coupled(const AlphaField& field, const SimConfig& cfg,
                             RandomStream& rs,
                             const IntervalUnion* split_set = nullptr,
                             const std::vector<NamedSet>& occupied_sets = {});

struct PathTooShort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The process observed on an external time grid: l_values is the internal
// time of the first clock value strictly above t (tie broken upward), g/h the
// clock values bracketing t, positions the value held during [g, h) (the
// pre-move point whose order generated that holding interval, matching the
// sigma1/sigma2 attribution), and ages the time since the observed value
// last changed.
struct TimeChangedSample {
  std::vector<double> external_times;
  std::vector<double> positions;
  std::vector<double> l_values;
  std::vector<double> g_values;
  std::vector<double> h_values;
  std::vector<double> ages;
};

// Requires external_times ascending, nonnegative and strictly below the
// path's final clock value; throws PathTooShort otherwise.
TimeChangedSample invert_time_change(const CoupledPath& path,
                                     const std::vector<double>& external_times);

// Left-endpoint quadrature of 1{X(s) in set} on [0, t] over the sample's
// grid, divided by t. The sliver [0, t_0) before the first grid point is
// attributed to X(t_0); for grids spanning decades this is a relative error
// of at most t_0/t. Requires t in (0, last grid point]. When the full path
// is available, prefer the exact overload below.
double occupation_fraction(const TimeChangedSample& sample,
                           const IntervalUnion& set, double t);

// Exact occupation fraction from the stored path: sums the parts of the
// holding intervals [sigma_{k-1}, sigma_k) owned by positions in the set,
// truncated at t and divided by t. Requires t in (0, final clock value].
double occupation_fraction(const CoupledPath& path, const IntervalUnion& set,
                           double t);

// Internal-time records for growth-law fits: state of the accumulators when
// internal time first reaches each grid value.
struct GrowthSeries {
  std::vector<double> t;
  std::vector<double> occupation;  // internal time spent in the split set
  std::vector<double> sigma1;
  std::vector<double> sigma2;
};

// One pass that performs the time-change inversion on the fly against a
// fixed external grid, without storing the path: memory is O(grid), so the
// step budget can be large. Entries the path never reached (truncated or out
// of budget) are NaN and status says why. Consumes random draws in exactly
// the same order as simulate_coupled.
struct StreamedPath {
  TimeChangedSample sample;
  // Exact external time covered by split-set holding intervals within
  // [0, t_j], one entry per external grid point (NaN without a split set or
  // when the grid point was never reached). Dividing by t_j gives the exact
  // occupation fraction, with no grid-quadrature error.
  std::vector<double> split_coverage;
  PathStatus status = PathStatus::Complete;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double split_occupation = 0.0;
  double final_internal_time = 0.0;
  double final_sigma = 0.0;
  GrowthSeries growth;  // filled when internal_grid is given
};

StreamedPath simulate_streaming(const AlphaField& field, const SimConfig& cfg,
                                RandomStream& rs,
                                const std::vector<double>& external_times,
                                const IntervalUnion* split_set = nullptr,
                                const std::vector<double>* internal_grid = nullptr);

// Binary path dump, little-endian: magic "VAPD", u32 version, u64 field
// hash, f64 dt, u8 status, f64 sigma1, f64 sigma2, f64 split_occupation,
// u64 record count, then (s, b, sigma) as 3 f64 per record.
void write_path_dump(const CoupledPath& path, double dt,
                     std::uint64_t field_hash, std::ostream& os);
CoupledPath read_path_dump(std::istream& is, double* dt_out = nullptr,
                           std::uint64_t* field_hash_out = nullptr);

}  // namespace varalpha
