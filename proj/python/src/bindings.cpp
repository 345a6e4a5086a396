#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "arcd/cli.hpp"
#include "arcd/experiment.hpp"
#include "arcd/metrics.hpp"
#include "arcd/runner.hpp"
#include "arcd/schedules.hpp"

namespace py = pybind11;
using namespace arcd;

namespace {

using DatasetPtr = std::shared_ptr<Dataset>;

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

template <class T, class F>
py::array_t<T> column(const std::vector<TraceRow>& rows, F field) {
  py::array_t<T> out(static_cast<py::ssize_t>(rows.size()));
  auto view = out.template mutable_unchecked<1>();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    view(static_cast<py::ssize_t>(i)) = static_cast<T>(field(rows[i]));
  }
  return out;
}

DatasetPtr from_dense(py::array_t<double, py::array::c_style | py::array::forcecast> features,
                      py::array_t<double, py::array::c_style | py::array::forcecast> labels) {
  if (features.ndim() != 2) throw ConfigError("features must be a 2-d array");
  if (labels.ndim() != 1 || labels.shape(0) != features.shape(0)) {
    throw ConfigError("labels must be a 1-d array with one entry per row");
  }
  const auto m = static_cast<std::size_t>(features.shape(0));
  const auto n = static_cast<std::size_t>(features.shape(1));
  DatasetBuilder builder(true);
  const double* f = features.data();
  const double* l = labels.data();
  for (std::size_t i = 0; i < m; ++i) {
    builder.add_dense_row(std::span<const double>(f + i * n, n), l[i]);
  }
  builder.set_cols(n).set_provenance("numpy");
  return std::make_shared<Dataset>(std::move(builder).build());
}

py::array_t<double> to_dense(const Dataset& d) {
  py::array_t<double> out({static_cast<py::ssize_t>(d.rows()), static_cast<py::ssize_t>(d.cols())});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t k = 0; k < d.cols(); ++k) view(i, k) = 0.0;
    const auto r = d.row(i);
    for (std::size_t j = 0; j < r.nnz(); ++j) view(i, r.index[j]) = r.value[j];
  }
  return out;
}

py::dict measured_dict(const MeasuredConstants& mc) {
  py::dict d;
  d["L"] = mc.L;
  d["sigma"] = mc.sigma;
  d["D"] = mc.D;
  d["R"] = mc.R;
  d["G"] = mc.G;
  return d;
}

}  // namespace

PYBIND11_MODULE(_arcd, m) {
  m.doc() = "Accelerated randomized coordinate descent: solvers, baselines and metrics";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ScheduleError>(m, "ScheduleError", base.ptr());
  py::register_exception<StepError>(m, "StepError", base.ptr());

  py::enum_<Algorithm>(m, "Algorithm")
      .value("SARCD", Algorithm::Sarcd)
      .value("OARCD", Algorithm::Oarcd)
      .value("SGD", Algorithm::Sgd)
      .value("OGD", Algorithm::Ogd)
      .value("ORBCD", Algorithm::Orbcd)
      .value("SAGE", Algorithm::Sage);
  py::enum_<Regime>(m, "Regime").value("GENERAL", Regime::General).value("STRONG", Regime::Strong);
  py::enum_<LossKind>(m, "LossKind")
      .value("SQUARED", LossKind::Squared)
      .value("LOGISTIC", LossKind::Logistic);
  py::enum_<Setting>(m, "Setting")
      .value("STOCHASTIC", Setting::Stochastic)
      .value("ONLINE", Setting::Online);
  py::enum_<Normalization>(m, "Normalization")
      .value("NONE", Normalization::None)
      .value("UNIT", Normalization::UnitRow)
      .value("MINMAX", Normalization::MinMax);
  py::enum_<ScheduleKind>(m, "ScheduleKind")
      .value("SARCD_GENERAL", ScheduleKind::SarcdGeneral)
      .value("SARCD_STRONG", ScheduleKind::SarcdStrong)
      .value("OARCD_GENERAL", ScheduleKind::OarcdGeneral)
      .value("OARCD_STRONG", ScheduleKind::OarcdStrong);

  // Data ----------------------------------------------------------------
  py::class_<Dataset, std::shared_ptr<Dataset>>(m, "Dataset")
      .def_property_readonly("rows", &Dataset::rows)
      .def_property_readonly("cols", &Dataset::cols)
      .def_property_readonly("nnz", &Dataset::nnz)
      .def_property_readonly("dense", &Dataset::dense)
      .def_property_readonly("provenance", &Dataset::provenance)
      .def_property_readonly("normalization", &Dataset::normalization)
      .def_property_readonly("labels",
                             [](const Dataset& d) {
                               return to_array({d.labels().begin(), d.labels().end()});
                             })
      .def("row",
           [](const Dataset& d, std::size_t i) {
             if (i >= d.rows()) throw py::index_error("row index out of range");
             const auto r = d.row(i);
             return py::make_tuple(std::vector<std::uint32_t>(r.index.begin(), r.index.end()),
                                   std::vector<double>(r.value.begin(), r.value.end()));
           })
      .def("to_numpy", &to_dense, "Dense feature matrix (rows x cols)")
      .def("__len__", &Dataset::rows)
      .def("__repr__", [](const Dataset& d) {
        return "<Dataset rows=" + std::to_string(d.rows()) + " cols=" + std::to_string(d.cols()) +
               (d.dense() ? " dense>" : " sparse>");
      });

  m.def("from_numpy", &from_dense, py::arg("features"), py::arg("labels"));
  m.def("load_csv",
        [](const std::filesystem::path& p, int label_column, bool header) -> DatasetPtr {
          return std::make_shared<Dataset>(load_csv(p, label_column, header));
        },
        py::arg("path"), py::arg("label_column") = -1, py::arg("header") = false);
  m.def("load_libsvm",
        [](const std::filesystem::path& p, std::optional<std::size_t> cols) -> DatasetPtr {
          return std::make_shared<Dataset>(load_libsvm(p, cols));
        },
        py::arg("path"), py::arg("cols") = py::none());
  m.def("write_csv", [](const Dataset& d, const std::filesystem::path& p,
                        bool header) { write_csv(d, p, header); },
        py::arg("data"), py::arg("path"), py::arg("header") = false);
  m.def("write_libsvm", &write_libsvm, py::arg("data"), py::arg("path"));
  m.def("normalize",
        [](const Dataset& d, Normalization mode) -> DatasetPtr {
          return std::make_shared<Dataset>(normalize(d, mode));
        },
        py::arg("data"), py::arg("mode"));
  m.def("to_binary_labels", [](const Dataset& d) -> DatasetPtr {
    return std::make_shared<Dataset>(to_binary_labels(d));
  });
  m.def("synth_quadratic",
        [](std::size_t n, std::size_t rows, double cond, double noise, std::uint64_t seed) {
          auto q = synth_quadratic(n, rows, cond, noise, seed);
          return py::make_tuple(std::make_shared<Dataset>(std::move(q.data)),
                                to_array(q.planted));
        },
        py::arg("n"), py::arg("m"), py::arg("condition") = 1.0, py::arg("noise") = 0.0,
        py::arg("seed") = 1);
  m.def("synth_classification",
        [](std::size_t n, std::size_t rows, double noise, std::uint64_t seed) -> DatasetPtr {
          return std::make_shared<Dataset>(synth_classification(n, rows, noise, seed));
        },
        py::arg("n"), py::arg("m"), py::arg("noise") = 0.0, py::arg("seed") = 1);
  m.def("synth_sparse",
        [](std::size_t n, std::size_t rows, std::size_t nnz, double noise,
           std::uint64_t seed) -> DatasetPtr {
          return std::make_shared<Dataset>(synth_sparse(n, rows, nnz, noise, seed));
        },
        py::arg("n"), py::arg("m"), py::arg("nnz_per_row"), py::arg("noise") = 0.0,
        py::arg("seed") = 1);
  m.def("breast_cancer_standin", [](std::uint64_t seed) -> DatasetPtr {
    return std::make_shared<Dataset>(breast_cancer_standin(seed));
  }, py::arg("seed") = 1);

  // Losses and comparators ----------------------------------------------
  py::class_<LossModel>(m, "LossModel")
      .def(py::init([](LossKind kind, DatasetPtr data, double mu) {
             return LossModel(kind, std::move(data), mu);
           }),
           py::arg("kind"), py::arg("data"),
           py::arg("mu") = 0.0)
      .def_property_readonly("dim", &LossModel::dim)
      .def_property_readonly("samples", &LossModel::samples)
      .def_property_readonly("mu", &LossModel::mu)
      .def("smoothness", &LossModel::smoothness)
      .def("value", [](const LossModel& l, const Vector& y, std::size_t i) { return l.value(y, i); })
      .def("gradient", [](const LossModel& l, const Vector& y,
                          std::size_t i) { return to_array(l.gradient(y, i)); })
      .def("partial", [](const LossModel& l, const Vector& y, std::size_t i,
                         std::size_t k) { return l.partial(y, i, k); })
      .def("objective", [](const LossModel& l, const Vector& y) { return l.objective(y); })
      .def("objective_gradient",
           [](const LossModel& l, const Vector& y) { return to_array(l.objective_gradient(y)); });

  py::class_<ComparatorResult>(m, "ComparatorResult")
      .def_property_readonly("y", [](const ComparatorResult& r) { return to_array(r.y); })
      .def_readonly("gradient_norm", &ComparatorResult::gradient_norm)
      .def_readonly("iterations", &ComparatorResult::iterations)
      .def_readonly("min_norm_fallback", &ComparatorResult::min_norm_fallback)
      .def_readonly("method", &ComparatorResult::method);
  m.def("comparator_full", &comparator_full, py::arg("loss"));
  m.def("comparator_for_rounds",
        [](const LossModel& l, const std::vector<std::size_t>& rounds) {
          return comparator_for_rounds(l, rounds);
        },
        py::arg("loss"), py::arg("rounds"));

  // Schedules -----------------------------------------------------------
  py::class_<ScheduleParams>(m, "ScheduleParams")
      .def_readonly("alpha_t", &ScheduleParams::alpha_t)
      .def_readonly("L_t", &ScheduleParams::L_t)
      .def_readonly("lambda_t", &ScheduleParams::lambda_t)
      .def_readonly("a_n", &ScheduleParams::a_n)
      .def_readonly("b_n", &ScheduleParams::b_n);
  py::class_<Schedule>(m, "Schedule")
      .def(py::init<ScheduleKind, std::size_t, double, double, double, double>(),
           py::arg("kind"), py::arg("n"), py::arg("L"), py::arg("mu") = 0.0, py::arg("b") = 1.0,
           py::arg("alpha") = 0.5)
      .def("advance", &Schedule::advance, py::arg("t"))
      .def("peek", &Schedule::peek, py::arg("t"))
      .def_property_readonly("first_step", &Schedule::first_step);

  // Runs ----------------------------------------------------------------
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("algorithm", &RunConfig::algorithm)
      .def_readwrite("regime", &RunConfig::regime)
      .def_readwrite("horizon", &RunConfig::horizon)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("loss", &RunConfig::loss)
      .def_readwrite("mu", &RunConfig::mu)
      .def_readwrite("b", &RunConfig::b)
      .def_readwrite("auto_b", &RunConfig::auto_b)
      .def_readwrite("alpha", &RunConfig::alpha)
      .def_readwrite("eta_c", &RunConfig::eta_c)
      .def_readwrite("emit_every", &RunConfig::emit_every)
      .def_readwrite("lazy", &RunConfig::lazy)
      .def_readwrite("diagnostics", &RunConfig::diagnostics)
      .def_readwrite("prefix_comparator", &RunConfig::prefix_comparator)
      .def_readwrite("sage_setting", &RunConfig::sage_setting)
      .def_property_readonly("setting", &RunConfig::setting);

  py::class_<RunTrace>(m, "RunTrace")
      .def_property_readonly("t", [](const RunTrace& tr) {
        return column<std::int64_t>(tr.rows, [](const TraceRow& r) { return r.t; });
      })
      .def_property_readonly("loss", [](const RunTrace& tr) {
        return column<double>(tr.rows, [](const TraceRow& r) { return r.loss; });
      })
      .def_property_readonly("cumulative_loss", [](const RunTrace& tr) {
        return column<double>(tr.rows, [](const TraceRow& r) { return r.cumulative_loss; });
      })
      .def_property_readonly("objective", [](const RunTrace& tr) {
        return column<double>(tr.rows, [](const TraceRow& r) { return r.objective; });
      })
      .def_property_readonly("metric", [](const RunTrace& tr) {
        return column<double>(tr.rows, [](const TraceRow& r) { return r.metric; });
      })
      .def_property_readonly("metric_strict", [](const RunTrace& tr) {
        return column<double>(tr.rows, [](const TraceRow& r) { return r.metric_strict; });
      })
      .def_property_readonly("coords_touched", [](const RunTrace& tr) {
        return column<std::uint64_t>(tr.rows, [](const TraceRow& r) { return r.coords_touched; });
      })
      .def_property_readonly("final_y", [](const RunTrace& tr) { return to_array(tr.final_y); })
      .def_property_readonly("final_metric", &RunTrace::final_metric)
      .def_readonly("setting", &RunTrace::setting)
      .def_readonly("b_used", &RunTrace::b_used)
      .def_readonly("step_ns", &RunTrace::step_ns)
      .def_readonly("f_star", &RunTrace::f_star)
      .def_readonly("comparator_total", &RunTrace::comparator_total)
      .def_readonly("wrapped", &RunTrace::wrapped)
      .def_readonly("rounds", &RunTrace::rounds)
      .def_readonly("comparator", &RunTrace::comparator)
      .def_property_readonly("round_margin",
                             [](const RunTrace& tr) { return to_array(tr.round_margin); })
      .def_property_readonly("measured",
                             [](const RunTrace& tr) { return measured_dict(tr.measured); });

  m.def("run",
        [](const RunConfig& c, DatasetPtr data) {
          py::gil_scoped_release release;
          return run(c, std::move(data));
        },
        py::arg("config"), py::arg("data"));
  m.def("online_rounds", &online_rounds, py::arg("m"), py::arg("horizon"));
  m.def("balanced_b",
        [](const LossModel& l, const Vector& start, const Vector& y_star) {
          return balanced_b(l, start, y_star);
        },
        py::arg("loss"), py::arg("start"), py::arg("y_star"));

  // Metrics -------------------------------------------------------------
  m.def("regret_curve",
        [](const Vector& losses, const Vector& comparator) {
          return to_array(regret_curve(losses, comparator));
        },
        py::arg("round_losses"), py::arg("comparator_losses"));
  m.def("classify_stats",
        [](const Vector& margins, const Vector& labels) {
          const auto s = classify_stats(margins, labels);
          return py::make_tuple(s.accuracy, s.mistakes, s.rounds);
        },
        py::arg("margins"), py::arg("labels"));
  m.def("sarcd_general_bound", &sarcd_general_bound);
  m.def("sarcd_strong_bound", &sarcd_strong_bound);
  m.def("oarcd_general_bound", &oarcd_general_bound);
  m.def("oarcd_strong_bound", &oarcd_strong_bound);

  // Command line --------------------------------------------------------
  m.def("cli_main",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = cli_main(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"),
        "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
  m.def("read_trace_metadata", [](const std::filesystem::path& p) {
    py::dict d;
    for (const auto& [k, v] : read_trace_metadata(p).entries) d[py::str(k)] = v;
    return d;
  });
  m.def("read_trace_body", &read_trace_body);
  m.attr("__version__") = version_string();
}
