// Python bindings for the solver core: matrix operators, problem
// construction, and the two experiment engines.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "amtl/data.hpp"
#include "amtl/errors.hpp"
#include "amtl/model.hpp"
#include "amtl/operators.hpp"
#include "amtl/runtime.hpp"
#include "amtl/scheduler.hpp"
#include "amtl/trace.hpp"

namespace py = pybind11;
using namespace amtl;

namespace {

using NumpyMatrix = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix matrix_from_numpy(const NumpyMatrix& arr) {
  if (arr.ndim() != 2) {
    throw DimensionError("expected a 2-D float array, got " +
                         std::to_string(arr.ndim()) + " dimensions");
  }
  DenseMatrix m(static_cast<std::size_t>(arr.shape(0)),
                static_cast<std::size_t>(arr.shape(1)));
  std::memcpy(m.data().data(), arr.data(), sizeof(double) * m.rows() * m.cols());
  return m;
}

py::array_t<double> numpy_from_matrix(const DenseMatrix& m) {
  py::array_t<double> arr({m.rows(), m.cols()});
  std::memcpy(arr.mutable_data(), m.data().data(),
              sizeof(double) * m.rows() * m.cols());
  return arr;
}

LossKind loss_kind_of(const std::string& s) {
  if (s == "squared") return LossKind::Squared;
  if (s == "logistic") return LossKind::Logistic;
  throw ArgumentError("unknown loss kind '" + s + "'");
}

Regularizer regularizer_of(const std::string& s) {
  if (s == "nuclear") return Regularizer::NuclearNorm;
  if (s == "l21") return Regularizer::L21;
  throw ArgumentError("unknown regularizer '" + s + "'");
}

RunConfig config_from_kwargs(const MtlProblem& problem, const std::string& mode,
                             const std::string& clock, std::size_t iterations,
                             double offset, double jitter, std::uint64_t seed,
                             double eta, double eta_min, double c,
                             std::int64_t tau_max, bool dynamic,
                             std::size_t window, std::size_t objective_every,
                             double kappa_grad, double kappa_svd,
                             const std::vector<double>& per_task_offset) {
  RunConfig cfg;
  if (mode == "amtl") {
    cfg.mode = Mode::Amtl;
  } else if (mode == "smtl") {
    cfg.mode = Mode::Smtl;
  } else {
    throw ArgumentError("mode must be 'amtl' or 'smtl'");
  }
  if (clock == "virtual") {
    cfg.clock = ClockKind::Virtual;
  } else if (clock == "real") {
    cfg.clock = ClockKind::Real;
  } else {
    throw ArgumentError("clock must be 'virtual' or 'real'");
  }
  cfg.iterations_per_task = iterations;
  cfg.delay_model.offset = offset;
  cfg.delay_model.jitter_scale = jitter;
  cfg.delay_model.seed = seed;
  cfg.delay_model.per_task_offset = per_task_offset;
  cfg.seed = seed;
  cfg.step_policy.eta = eta;
  cfg.step_policy.eta_min = eta_min;
  cfg.step_policy.c = c;
  cfg.step_policy.tau_max = tau_max >= 0 ? static_cast<std::size_t>(tau_max)
                                         : 2 * problem.task_count();
  cfg.step_policy.dynamic = dynamic;
  cfg.step_policy.window = window;
  cfg.objective_every = objective_every;
  cfg.kappa_grad = kappa_grad;
  cfg.kappa_svd = kappa_svd;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Asynchronous multi-task learning solver core";

  const auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<ArgumentError>(m, "ArgumentError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<IoError>(m, "IoError", base);
  const auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base);
  py::register_exception<StalenessError>(m, "StalenessError", numerical);

  py::class_<MtlProblem>(m, "Problem")
      .def_property_readonly("task_count", &MtlProblem::task_count)
      .def_property_readonly("dim", [](const MtlProblem& p) { return p.dim; })
      .def_property_readonly("lam", [](const MtlProblem& p) { return p.lambda; })
      .def_property_readonly("regularizer",
                             [](const MtlProblem& p) {
                               return p.regularizer == Regularizer::NuclearNorm
                                          ? "nuclear"
                                          : "l21";
                             })
      .def_property_readonly("sample_counts",
                             [](const MtlProblem& p) {
                               std::vector<std::size_t> n;
                               for (const auto& t : p.tasks) n.push_back(t.sample_count());
                               return n;
                             })
      .def("smooth_lipschitz", &MtlProblem::smooth_lipschitz)
      .def("objective",
           [](const MtlProblem& p, const NumpyMatrix& w) {
             return objective(p, matrix_from_numpy(w));
           },
           py::arg("w"))
      .def("optimality_residual",
           [](const MtlProblem& p, const NumpyMatrix& w, double eta) {
             return optimality_residual(p, matrix_from_numpy(w), eta);
           },
           py::arg("w"), py::arg("eta"))
      .def("save", [](const MtlProblem& p, const std::string& dir) {
        save_csv_dir(p, dir);
      },
           py::arg("dir"));

  py::class_<UpdateEvent>(m, "UpdateEvent")
      .def_readonly("task_id", &UpdateEvent::task_id)
      .def_readonly("k", &UpdateEvent::k)
      .def_property_readonly("request_time",
                             [](const UpdateEvent& e) {
                               return static_cast<double>(e.request_time_ns) / 1e9;
                             })
      .def_property_readonly("write_time",
                             [](const UpdateEvent& e) {
                               return static_cast<double>(e.write_time_ns) / 1e9;
                             })
      .def_readonly("staleness", &UpdateEvent::staleness)
      .def_readonly("objective_after", &UpdateEvent::objective_after);

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("final_w",
                             [](const RunResult& r) { return numpy_from_matrix(r.final_w); })
      .def_property_readonly("final_v",
                             [](const RunResult& r) { return numpy_from_matrix(r.final_v); })
      .def_property_readonly("makespan", &RunResult::makespan_seconds)
      .def_readonly("final_objective", &RunResult::final_objective)
      .def_readonly("measured_tau", &RunResult::measured_tau)
      .def_readonly("per_task_update_counts", &RunResult::per_task_update_counts)
      .def_readonly("events", &RunResult::events)
      .def_property_readonly("mode",
                             [](const RunResult& r) {
                               return mode_name(r.config_echo.mode);
                             })
      .def("events_csv", [](const RunResult& r) { return events_csv(r); })
      .def("summary_csv", [](const RunResult& r) { return summary_csv(r); })
      .def("export_csv", [](const RunResult& r, const std::string& dir) {
        export_csv(r, dir);
      },
           py::arg("dir"));

  m.def("gen_synthetic",
        [](std::size_t tasks, std::size_t samples, std::size_t dim,
           std::size_t rank, double noise, std::uint64_t seed,
           const std::string& loss, double lam, const std::string& regularizer,
           double l2_augment) {
          SyntheticSpec spec;
          spec.t_count = tasks;
          spec.n_per_task = samples;
          spec.dim = dim;
          spec.true_rank = rank;
          spec.noise_sigma = noise;
          spec.seed = seed;
          spec.loss_kind = loss_kind_of(loss);
          SyntheticProblem sp =
              gen_synthetic(spec, lam, regularizer_of(regularizer), l2_augment);
          return py::make_tuple(std::move(sp.problem), numpy_from_matrix(sp.w_star));
        },
        py::arg("tasks"), py::arg("samples"), py::arg("dim"), py::arg("rank"),
        py::arg("noise") = 0.0, py::arg("seed") = 0,
        py::arg("loss") = "squared", py::arg("lam") = 1.0,
        py::arg("regularizer") = "nuclear", py::arg("l2_augment") = 0.0,
        "Generate a synthetic problem; returns (problem, generating_model).");

  m.def("load_problem",
        [](const std::string& dir) { return load_csv_dir(dir); }, py::arg("dir"),
        "Load a task directory written by save/gen.");

  m.def("run",
        [](const MtlProblem& problem, const std::string& mode,
           const std::string& clock, std::size_t iterations, double offset,
           double jitter, std::uint64_t seed, double eta, double eta_min,
           double c, std::int64_t tau_max, bool dynamic, std::size_t window,
           std::size_t objective_every, double kappa_grad, double kappa_svd,
           const std::vector<double>& per_task_offset) {
          const RunConfig cfg = config_from_kwargs(
              problem, mode, clock, iterations, offset, jitter, seed, eta,
              eta_min, c, tau_max, dynamic, window, objective_every, kappa_grad,
              kappa_svd, per_task_offset);
          py::gil_scoped_release release;
          return run(problem, cfg);
        },
        py::arg("problem"), py::arg("mode") = "amtl",
        py::arg("clock") = "virtual", py::arg("iterations") = 10,
        py::arg("offset") = 0.0, py::arg("jitter") = 0.0, py::arg("seed") = 0,
        py::arg("eta") = 0.0, py::arg("eta_min") = 1e-4, py::arg("c") = 0.9,
        py::arg("tau_max") = -1, py::arg("dynamic") = false,
        py::arg("window") = 5, py::arg("objective_every") = 0,
        py::arg("kappa_grad") = 1e-8, py::arg("kappa_svd") = 1e-8,
        py::arg("per_task_offset") = std::vector<double>{},
        "Run one engine; tau_max < 0 defaults to 2T, eta 0 defaults to 1/L.");

  m.def("thin_svd",
        [](const NumpyMatrix& a) {
          const SvdFactors f = thin_svd(matrix_from_numpy(a));
          return py::make_tuple(numpy_from_matrix(f.u), f.s, numpy_from_matrix(f.q));
        },
        py::arg("a"), "Thin SVD (u, s, q) with a = u @ diag(s) @ q.T.");

  m.def("nuclear_norm",
        [](const NumpyMatrix& a) { return nuclear_norm(matrix_from_numpy(a)); },
        py::arg("a"));

  m.def("lipschitz_bound",
        [](const NumpyMatrix& x, const std::string& loss) {
          return lipschitz_bound(matrix_from_numpy(x), loss_kind_of(loss));
        },
        py::arg("x"), py::arg("loss") = "squared");

  m.def("prox_nuclear",
        [](const NumpyMatrix& v, double threshold) {
          return numpy_from_matrix(prox_nuclear(matrix_from_numpy(v), threshold).w_matrix);
        },
        py::arg("v"), py::arg("threshold"));

  m.def("prox_l21",
        [](const NumpyMatrix& v, double threshold) {
          return numpy_from_matrix(prox_l21(matrix_from_numpy(v), threshold));
        },
        py::arg("v"), py::arg("threshold"));

  m.def("km_step_size",
        [](std::size_t t_count, double c, std::size_t tau_max, double eta_min) {
          StepPolicy policy;
          policy.c = c;
          policy.tau_max = tau_max;
          policy.eta_min = eta_min;
          return km_step_size(policy, t_count);
        },
        py::arg("t_count"), py::arg("c") = 0.9, py::arg("tau_max") = 0,
        py::arg("eta_min") = 1e-4);

  m.def("dynamic_multiplier",
        [](const std::vector<double>& delays, std::size_t window) {
          DelayHistory h(0, window);
          for (double d : delays) record_delay(h, d);
          return dynamic_multiplier(h);
        },
        py::arg("delays"), py::arg("window") = 5,
        "Multiplier from a sequence of delays (seconds), newest last.");
}
