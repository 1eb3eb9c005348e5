#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "varalpha/alpha_field.hpp"
#include "varalpha/config.hpp"
#include "varalpha/experiments.hpp"
#include "varalpha/mittag_leffler.hpp"
#include "varalpha/pde.hpp"
#include "varalpha/rng.hpp"
#include "varalpha/sim.hpp"
#include "varalpha/stats.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace varalpha;

namespace {

IntervalUnion union_from_pairs(const std::vector<std::pair<double, double>>& parts) {
  IntervalUnion u;
  for (const auto& [lo, hi] : parts) u.add(lo, hi);
  return u;
}

std::vector<std::pair<double, double>> union_to_pairs(const IntervalUnion& u) {
  std::vector<std::pair<double, double>> out;
  out.reserve(u.size());
  for (const Interval& p : u.parts()) out.emplace_back(p.lo, p.hi);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "time-changed Brownian motion with position-dependent "
            "waiting-time order: samplers, path simulation, grid solver";

  // ---- primitives ---------------------------------------------------------

  m.def(
      "sample_positive_stable",
      [](double alpha, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
        RandomStream rs(seed, stream);
        std::vector<double> out(n);
        for (double& v : out) v = sample_positive_stable(alpha, rs);
        return out;
      },
      py::arg("alpha"), py::arg("n"), py::arg("seed") = 1,
      py::arg("stream") = 0,
      "n one-sided stable draws S with E[exp(-l S)] = exp(-l^alpha)");

  m.def("mittag_leffler", &mittag_leffler, py::arg("alpha"), py::arg("z"),
        "E_alpha(z) for 0 < alpha <= 1 and z <= 0");

  m.def(
      "ks_two_sample",
      [](std::vector<double> a, std::vector<double> b) {
        const KsResult r = ks_two_sample(std::move(a), std::move(b));
        return py::make_tuple(r.d, r.p_value);
      },
      py::arg("a"), py::arg("b"),
      "two-sample Kolmogorov-Smirnov statistic and asymptotic p-value");

  // ---- sets and fields ----------------------------------------------------

  py::class_<IntervalUnion>(m, "IntervalUnion")
      .def(py::init(&union_from_pairs), py::arg("parts"),
           "build from a list of (lo, hi) pairs")
      .def("contains", &IntervalUnion::contains, py::arg("x"))
      .def("parts", &union_to_pairs)
      .def("total_length", &IntervalUnion::total_length)
      .def("__repr__", [](const IntervalUnion& u) {
        return "IntervalUnion(" + u.describe() + ")";
      });

  py::class_<RegimePrediction>(m, "RegimePrediction")
      .def_property_readonly(
          "kind", [](const RegimePrediction& p) { return std::string(to_string(p.kind)); })
      .def_property_readonly(
          "target_set", [](const RegimePrediction& p) { return union_to_pairs(p.target_set); })
      .def_readonly("condition_lhs", &RegimePrediction::condition_lhs)
      .def_readonly("condition_rhs", &RegimePrediction::condition_rhs)
      .def("__repr__", [](const RegimePrediction& p) {
        std::ostringstream os;
        os << "RegimePrediction(" << to_string(p.kind) << ", "
           << p.condition_lhs << " vs " << p.condition_rhs << ")";
        return os.str();
      });

  py::class_<AlphaField>(m, "AlphaField")
      .def_static("constant", [](double a) { return AlphaField::constant(a); },
                  py::arg("alpha"))
      .def_static(
          "two_level",
          [](double a_in, double a_out, double lo, double hi) {
            return AlphaField::two_level(a_in, a_out, lo, hi);
          },
          py::arg("alpha_in"), py::arg("alpha_out"), py::arg("lo") = 0.0,
          py::arg("hi") = 1.0)
      .def_static(
          "piecewise",
          [](std::vector<double> breaks, std::vector<double> values,
             double tail_left, double tail_right) {
            return AlphaField::piecewise_constant(std::move(breaks),
                                                  std::move(values), tail_left,
                                                  tail_right);
          },
          py::arg("breakpoints"), py::arg("values"), py::arg("tail_left"),
          py::arg("tail_right"))
      .def_static(
          "lattice",
          [](double a_min, double a_out, double c, double extent) {
            return AlphaField::lattice(a_min, a_out, c, extent);
          },
          py::arg("alpha_min"), py::arg("alpha_out"), py::arg("c"),
          py::arg("extent") = 1e6)
      .def_static(
          "vee",
          [](double a_min, double a_tail, double half_width) {
            return AlphaField::vee(a_min, a_tail, half_width);
          },
          py::arg("alpha_min"), py::arg("alpha_tail"), py::arg("half_width") = 1.0)
      .def_static(
          "tabulated",
          [](std::vector<double> grid, std::vector<double> values) {
            return AlphaField::tabulated(std::move(grid), std::move(values));
          },
          py::arg("grid"), py::arg("values"))
      .def("__call__", &AlphaField::operator(), py::arg("x"))
      .def_property_readonly("alpha_star", &AlphaField::alpha_star)
      .def("level_set",
           [](const AlphaField& f, double beta) {
             return union_to_pairs(f.level_set(beta));
           },
           py::arg("beta"))
      .def("classify",
           [](const AlphaField& f) { return classify_regime(f.structure()); },
           "dichotomy prediction from the field's minimum structure");

  // ---- path simulation ----------------------------------------------------

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init([](double dt, double x0, double target_time,
                       double internal_time, std::uint64_t max_steps) {
             SimConfig c;
             c.dt = dt;
             c.x0 = x0;
             c.target_external_time = target_time;
             c.target_internal_time = internal_time;
             c.max_steps = max_steps;
             return c;
           }),
           py::arg("dt") = 1e-2, py::arg("x0") = 0.0,
           py::arg("target_time") = 1.0, py::arg("internal_time") = 0.0,
           py::arg("max_steps") = 50'000'000)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("x0", &SimConfig::x0)
      .def_readwrite("target_time", &SimConfig::target_external_time)
      .def_readwrite("internal_time", &SimConfig::target_internal_time)
      .def_readwrite("max_steps", &SimConfig::max_steps);

  py::class_<CoupledPath>(m, "CoupledPath")
      .def_property_readonly("status",
                             [](const CoupledPath& p) {
                               return std::string(to_string(p.status));
                             })
      .def_readonly("sigma1", &CoupledPath::sigma1)
      .def_readonly("sigma2", &CoupledPath::sigma2)
      .def_readonly("split_occupation", &CoupledPath::split_occupation)
      .def_property_readonly("s",
                             [](const CoupledPath& p) {
                               std::vector<double> v;
                               v.reserve(p.steps.size());
                               for (const auto& st : p.steps) v.push_back(st.s);
                               return v;
                             })
      .def_property_readonly("b",
                             [](const CoupledPath& p) {
                               std::vector<double> v;
                               v.reserve(p.steps.size());
                               for (const auto& st : p.steps) v.push_back(st.b);
                               return v;
                             })
      .def_property_readonly("sigma",
                             [](const CoupledPath& p) {
                               std::vector<double> v;
                               v.reserve(p.steps.size());
                               for (const auto& st : p.steps)
                                 v.push_back(st.sigma);
                               return v;
                             })
      .def("__len__", [](const CoupledPath& p) { return p.steps.size(); });

  py::class_<TimeChangedSample>(m, "TimeChangedSample")
      .def_readonly("t", &TimeChangedSample::external_times)
      .def_readonly("x", &TimeChangedSample::positions)
      .def_readonly("l", &TimeChangedSample::l_values)
      .def_readonly("g", &TimeChangedSample::g_values)
      .def_readonly("h", &TimeChangedSample::h_values)
      .def_readonly("age", &TimeChangedSample::ages);

  m.def(
      "simulate_coupled",
      [](const AlphaField& field, const SimConfig& cfg, std::uint64_t seed,
         std::uint64_t stream, std::optional<IntervalUnion> split) {
        RandomStream rs(seed, stream);
        return simulate_coupled(field, cfg, rs, split ? &*split : nullptr);
      },
      py::arg("field"), py::arg("config"), py::arg("seed") = 1,
      py::arg("stream") = 0, py::arg("split") = std::nullopt,
      "one internal path of the pair (B, sigma)");

  m.def("invert_time_change", &invert_time_change, py::arg("path"),
        py::arg("external_times"),
        "observe X(t) = B(L(t)) on an ascending external grid");

  m.def("occupation_fraction",
        py::overload_cast<const TimeChangedSample&, const IntervalUnion&,
                          double>(&occupation_fraction),
        py::arg("sample"), py::arg("set"), py::arg("t"),
        "grid quadrature of the time spent in the set, over a sample");
  m.def("occupation_fraction",
        py::overload_cast<const CoupledPath&, const IntervalUnion&, double>(
            &occupation_fraction),
        py::arg("path"), py::arg("set"), py::arg("t"),
        "exact time fraction spent in the set, from a stored path");

  // ---- ensembles ----------------------------------------------------------

  py::class_<EnsembleSummary>(m, "EnsembleSummary")
      .def_readonly("t", &EnsembleSummary::t_grid)
      .def_readonly("occ_mean", &EnsembleSummary::occ_mean)
      .def_readonly("occ_ci95", &EnsembleSummary::occ_ci_halfwidth)
      .def_readonly("hit_prob", &EnsembleSummary::hit_prob)
      .def_readonly("hit_ci95", &EnsembleSummary::hit_ci_halfwidth)
      .def_readonly("n_complete", &EnsembleSummary::n_complete)
      .def_readonly("n_incomplete", &EnsembleSummary::n_incomplete);

  m.def(
      "run_ensemble",
      [](const AlphaField& field, const SimConfig& cfg,
         const IntervalUnion& target, const std::vector<double>& t_grid,
         std::size_t n_paths, std::uint64_t seed, int threads) {
        EnsembleOptions eo;
        eo.n_paths = n_paths;
        eo.base_seed = seed;
        eo.threads = threads;
        return run_ensemble(field, cfg, eo, target, t_grid);
      },
      py::arg("field"), py::arg("config"), py::arg("target"),
      py::arg("t_grid"), py::arg("n_paths") = 100, py::arg("seed") = 1,
      py::arg("threads") = 1,
      "occupation fraction and hit probability of `target` across paths");

  // ---- grid solver --------------------------------------------------------

  py::class_<FieldSolution>(m, "FieldSolution")
      .def_readonly("t", &FieldSolution::t_grid)
      .def_property_readonly(
          "x", [](const FieldSolution& s) { return s.grid.centers(); })
      .def_readonly("orders", &FieldSolution::orders)
      .def_property_readonly("n_steps",
                             [](const FieldSolution& s) { return s.n_steps; })
      .def("level",
           [](const FieldSolution& s, std::size_t n) {
             if (n > s.n_steps) throw py::index_error("time level out of range");
             return std::vector<double>(s.row(n), s.row(n) + s.grid.n_x);
           },
           py::arg("n"), "solution values at time level n")
      .def("interpolate", &FieldSolution::interpolate, py::arg("n"), py::arg("x"))
      .def("residual", &mild_residual,
           "defect of the integrated-form identity at the final time");

  m.def(
      "solve_fde",
      [](const AlphaField& field, double x_min, double x_max, int n_x,
         const std::string& boundary, const std::vector<double>& initial,
         double t_final, double dt) {
        Grid1D g;
        g.x_min = x_min;
        g.x_max = x_max;
        g.n_x = n_x;
        if (boundary == "periodic")
          g.boundary = BoundaryKind::Periodic;
        else if (boundary == "dirichlet0")
          g.boundary = BoundaryKind::Dirichlet0;
        else if (boundary == "neumann0")
          g.boundary = BoundaryKind::Neumann0;
        else
          throw std::invalid_argument("boundary must be periodic, dirichlet0 "
                                      "or neumann0");
        return solve_fde(field, g, initial, t_final, dt);
      },
      py::arg("field"), py::arg("x_min"), py::arg("x_max"), py::arg("n_x"),
      py::arg("boundary"), py::arg("initial"), py::arg("t_final"),
      py::arg("dt"),
      "implicit memory-diffusion solve on a cell-centered grid");

  // ---- config-driven experiments ------------------------------------------

  m.def(
      "run_experiment",
      [](const std::string& name, const std::string& config_text) {
        Config cfg = Config::from_string(config_text, "<python>");
        std::ostringstream log;
        const int code = run_experiment(name, cfg, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("name"), py::arg("config_text"),
      "run a named experiment from config text; returns (exit_code, summary)");

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
