#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "varalpha/alpha_field.hpp"
#include "varalpha/config.hpp"
#include "varalpha/pde.hpp"
#include "varalpha/sim.hpp"

namespace varalpha {

// Process exit codes shared by the experiment driver and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconsistent = 2;
inline constexpr int kExitInconclusive = 3;

// Config-section builders, shared with the test-suite. Each consumes the
// keys it understands; anything left unconsumed fails the run later.
AlphaField make_field(Config& cfg);                 // [field]
SimConfig make_sim_config(Config& cfg);             // [sim]
Grid1D make_pde_grid(Config& cfg);                  // [pde] geometry
std::function<double(double)> make_initial_fn(Config& cfg);  // [pde] initial data
// Watched spatial set: explicit `target.intervals = lo1,hi1,...` wins,
// otherwise the field's minimum set (when attained by a jump) or the
// sublevel set at offset `target.beta`.
IntervalUnion make_target_set(Config& cfg, const AlphaField& field);

// Experiment names accepted by run_experiment, in canonical order.
const std::vector<std::string>& experiment_names();

// Executes one named experiment against the parsed config: reads its
// sections, rejects leftover keys, writes CSV artifacts into `output.dir`
// and prints a short summary to `log`. Returns the exit code; config and
// execution problems throw.
int run_experiment(const std::string& name, Config& cfg, std::ostream& log);

}  // namespace varalpha
