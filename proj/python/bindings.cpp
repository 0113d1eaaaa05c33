#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numeric>

#include "adaptloop/config.hpp"
#include "adaptloop/report.hpp"
#include "adaptloop/scenarios.hpp"

namespace py = pybind11;
namespace al = adaptloop;

namespace {

al::RunConfig config_from(const std::string& text) { return al::parse_config(text); }

py::dict extrema_dict(const std::vector<al::Extremum>& ex) {
  py::dict d;
  for (const auto& e : ex) d[py::str(e.genotype.to_string())] = e.fitness;
  return d;
}

}  // namespace

PYBIND11_MODULE(_adaptloop, m) {
  m.doc() = "Closed-loop arousal/performance simulator on NK fitness landscapes";

  static py::exception<al::Error> base(m, "AdaptloopError", PyExc_RuntimeError);
  static py::exception<al::ConfigError> config_error(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const al::ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const al::Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<al::Landscape>(m, "Landscape")
      .def_static("generate_nk", &al::Landscape::generate_nk, py::arg("n"), py::arg("k"),
                  py::arg("seed"))
      .def_static("from_json", &al::Landscape::from_json)
      .def_property_readonly("n", &al::Landscape::n)
      .def_property_readonly("k", &al::Landscape::k)
      .def_property_readonly("seed", &al::Landscape::seed)
      .def("evaluate",
           [](const al::Landscape& l, const std::string& g) {
             return l.evaluate(al::Genotype::parse(g));
           })
      .def("fitness_table", &al::Landscape::fitness_table)
      .def("to_json", &al::Landscape::to_json)
      .def("local_maxima",
           [](const al::Landscape& l) {
             return extrema_dict(al::local_extrema(l, al::ExtremumKind::kMaxima));
           })
      .def("local_minima",
           [](const al::Landscape& l) {
             return extrema_dict(al::local_extrema(l, al::ExtremumKind::kMinima));
           })
      .def("ruggedness",
           [](const al::Landscape& l, int walk_length, std::uint64_t seed) {
             const auto r = al::ruggedness_autocorrelation(l, walk_length, seed);
             return py::make_tuple(r.rho, r.zero_variance);
           },
           py::arg("walk_length"), py::arg("seed"))
      .def("adaptive_walk",
           [](const al::Landscape& l, const std::string& start, bool ascent, int max_steps) {
             const auto path = al::adaptive_walk(
                 l, al::Genotype::parse(start),
                 ascent ? al::WalkDirection::kAscent : al::WalkDirection::kDescent,
                 al::TieRule::lowest_index(), max_steps);
             std::vector<std::string> steps;
             for (const auto& g : path.steps) steps.push_back(g.to_string());
             return py::make_tuple(steps, path.fitnesses);
           },
           py::arg("start"), py::arg("ascent") = true, py::arg("max_steps") = 1 << 20);

  m.def("fitness_coefficient", &al::fitness_coefficient, py::arg("x"), py::arg("x_min"),
        py::arg("x_max"));
  m.def("selection_coefficient", &al::selection_coefficient, py::arg("stimulus_clarity"),
        py::arg("degradation"));
  m.def("classify_phase",
        [](double f, double s) {
          const auto a = al::classify_phase(f, s);
          py::dict d;
          d["phase"] = std::string(al::to_string(a.phase));
          d["evolvable"] = a.e_d;
          d["robust"] = a.r_d;
          d["brittle"] = a.b_d;
          return d;
        },
        py::arg("f_c"), py::arg("s_c"));
  m.def("equilibrium_times",
        [](const std::vector<double>& f, const std::vector<double>& s, double dt) {
          return al::equilibrium_times(f, s, dt);
        },
        py::arg("f"), py::arg("s"), py::arg("dt"));
  m.def("regime",
        [](const std::vector<double>& f, const std::vector<double>& s, double dt) {
          std::vector<std::string> out;
          for (auto r : al::regime(f, s, dt)) out.emplace_back(al::to_string(r));
          return out;
        },
        py::arg("f"), py::arg("s"), py::arg("dt"));
  m.def("gauge_of", &al::gauge_of, py::arg("performance"));
  m.def("fit_power_law",
        [](const std::vector<double>& n, const std::vector<double>& t) {
          const auto fit = al::fit_power_law(n, t);
          return py::make_tuple(fit.a, fit.b, fit.r_squared);
        },
        py::arg("trial_index"), py::arg("time"));
  m.def("format_number", &al::format_number);

  m.def("default_config", [] { return al::serialize_config(al::RunConfig{}); });
  m.def("normalize_config", [](const std::string& text) {
    return al::serialize_config(config_from(text));
  });

  m.def("simulate",
        [](const std::string& config_text, std::optional<std::string> controller,
           std::optional<std::uint64_t> seed, std::optional<long> steps) {
          al::RunConfig c = config_from(config_text);
          if (controller) c.controller = *controller;
          if (seed) c.seed = *seed;
          if (steps) c.steps = *steps;
          al::validate(c);
          py::gil_scoped_release release;
          auto trace = al::run_closed_loop(al::selected_scenario(c),
                                           al::controller_by_name(c, c.controller), c.setup,
                                           c.seed, c.steps, c.dt);
          return al::trace_csv(trace);
        },
        py::arg("config") = "", py::arg("controller") = py::none(), py::arg("seed") = py::none(),
        py::arg("steps") = py::none(), "Runs one simulation and returns trace.csv text");

  m.def("four_step",
        [](const std::string& config_text, std::optional<std::uint64_t> seed) {
          const al::RunConfig c = config_from(config_text);
          const auto r = al::run_four_step(c.four_step, c.setup, seed.value_or(c.seed));
          return py::make_tuple(r.gauges, r.readout_performance);
        },
        py::arg("config") = "", py::arg("seed") = py::none(),
        "Returns (gauges, readout performance) of the three segments");

  m.def("practice",
        [](const std::string& config_text, bool nonstationary, std::optional<std::uint64_t> seed) {
          const al::RunConfig c = config_from(config_text);
          const auto r = al::run_practice(c.practice, c.setup, seed.value_or(c.seed), nonstationary);
          return py::make_tuple(r.trial_times, py::make_tuple(r.fit.a, r.fit.b, r.fit.r_squared));
        },
        py::arg("config") = "", py::arg("nonstationary") = false, py::arg("seed") = py::none());

  m.def("compare",
        [](const std::string& config_text, std::optional<int> ensemble, unsigned workers) {
          al::RunConfig c = config_from(config_text);
          if (ensemble) c.compare.ensemble = *ensemble;
          al::validate(c);
          al::CompareOptions opts;
          opts.bootstrap_resamples = c.compare.bootstrap_resamples;
          opts.workers = workers;
          std::string out;
          {
            py::gil_scoped_release release;
            const auto result =
                al::compare_controllers(al::comparison_ensemble(c, c.compare.ensemble),
                                        c.threshold, c.landscape_controller, c.setup, c.seed,
                                        c.dt, opts);
            out = al::report_json(result.report).dump(2) + "\n";
          }
          return out;
        },
        py::arg("config") = "", py::arg("ensemble") = py::none(), py::arg("workers") = 0,
        "Returns the comparison report as JSON text");
}
