#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scfr/cfr.hpp"
#include "scfr/data_io.hpp"
#include "scfr/errors.hpp"
#include "scfr/evaluation.hpp"
#include "scfr/spline_basis.hpp"

namespace py = pybind11;
using namespace scfr;

namespace {

py::tuple xy(const Dataset& ds) { return py::make_tuple(ds.features, ds.target); }

Dataset from_arrays(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw StructuralError("X and y row counts differ");
  Dataset ds;
  ds.features = X;
  ds.target = y;
  return ds;
}

py::dict split_dict(const SplitPair& s) {
  py::dict d;
  d["train_rows"] = s.train_rows;
  d["test_rows"] = s.test_rows;
  d["threshold"] = s.threshold;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spline continued fraction regression";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      py::set_error(input_error, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<FitConfig>(m, "FitConfig")
      .def(py::init<>())
      .def_readwrite("lambda_", &FitConfig::lambda)
      .def_readwrite("knots_per_depth", &FitConfig::knots_per_depth)
      .def_readwrite("norm", &FitConfig::norm)
      .def_readwrite("max_depth", &FitConfig::max_depth)
      .def_readwrite("auto_depth", &FitConfig::auto_depth)
      .def_readwrite("offset_epsilon", &FitConfig::offset_epsilon)
      .def_readwrite("offset_scale", &FitConfig::offset_scale)
      .def_readwrite("denom_floor", &FitConfig::denom_floor)
      .def_readwrite("literal_final_offset", &FitConfig::literal_final_offset)
      .def("validate", &FitConfig::validate);

  py::class_<CFracModel>(m, "Model")
      .def_property_readonly("depth", &CFracModel::depth)
      .def_property_readonly("feature_count", &CFracModel::feature_count)
      .def_readonly("norm", &CFracModel::norm)
      .def_readonly("training_target_max", &CFracModel::training_target_max)
      .def_readwrite("feature_names", &CFracModel::feature_names)
      .def_property_readonly("offsets",
                             [](const CFracModel& mod) {
                               std::vector<double> out;
                               for (const auto& l : mod.layers) out.push_back(l.offset);
                               return out;
                             })
      .def("predict", &CFracModel::predict, py::arg("X"))
      .def("predict_all_depths", &CFracModel::predict_all_depths, py::arg("X"))
      .def("truncated", &CFracModel::truncated, py::arg("depth"))
      .def("to_json", [](const CFracModel& mod) { return serialize(mod); })
      .def_static("from_json", &deserialize, py::arg("document"));

  py::class_<DepthTrace>(m, "DepthTrace")
      .def_readonly("depth", &DepthTrace::depth)
      .def_readonly("train_rmse", &DepthTrace::train_rmse)
      .def_readonly("knot_count", &DepthTrace::knot_count)
      .def_readonly("offset", &DepthTrace::offset)
      .def_readonly("seconds", &DepthTrace::seconds);

  m.def("fit", &fit, py::arg("X"), py::arg("y"), py::arg("config") = FitConfig{}, py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "fit_traced",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& cfg) {
        FitResult r;
        {
          py::gil_scoped_release release;
          r = fit_traced(X, y, cfg);
        }
        return py::make_tuple(std::move(r.model), r.trace, r.chosen_depth);
      },
      py::arg("X"), py::arg("y"), py::arg("config") = FitConfig{});
  m.def("rmse_by_depth", &rmse_by_depth, py::arg("model"), py::arg("X"), py::arg("y"));
  m.def("select_truncation_depth",
        [](const std::vector<double>& r) { return select_truncation_depth(r); });
  m.def("select_knots", [](const std::vector<double>& r, int k) { return select_knots(r, k); },
        py::arg("residuals"), py::arg("k"));
  m.def(
      "compute_offset",
      [](const std::vector<double>& r, double eps, double scale) { return compute_offset(r, eps, scale); },
      py::arg("residuals"), py::arg("offset_epsilon"), py::arg("offset_scale") = 0.0);

  m.def(
      "eval_basis",
      [](const std::vector<double>& interior, double lo, double hi, double x) {
        return eval_basis(KnotVector::build(interior, lo, hi), x);
      },
      py::arg("interior"), py::arg("lo"), py::arg("hi"), py::arg("x"));
  m.def("penalty_block", &penalty_block, py::arg("basis_count"));

  m.def("rmse", [](const std::vector<double>& a, const std::vector<double>& b) { return rmse(a, b); });
  m.def("mean_relative_error",
        [](const std::vector<double>& a, const std::vector<double>& b) { return mean_relative_error(a, b); });
  m.def("threshold_counts", [](const std::vector<double>& p, double t) {
    const auto c = threshold_counts(p, t);
    return py::make_tuple(c.p_count, c.n_count);
  });
  m.def("cohen_kappa", &cohen_kappa);
  m.def("kappa_label", &kappa_label);

  m.def(
      "gen_gamma",
      [](int n, double lo, double hi, double noise, std::uint64_t seed) {
        return xy(gen_gamma({n, lo, hi, noise, seed}));
      },
      py::arg("n") = 200, py::arg("lo") = 0.5, py::arg("hi") = 6.0, py::arg("noise_sd") = 1.0,
      py::arg("seed") = 0);
  m.def(
      "gen_sinc",
      [](int n, double lo, double hi, double noise, std::uint64_t seed) {
        return xy(gen_sinc({n, lo, hi, noise, seed}));
      },
      py::arg("n") = 200, py::arg("lo") = -10.0, py::arg("hi") = 10.0, py::arg("noise_sd") = 0.05,
      py::arg("seed") = 0);
  m.def(
      "split_out_of_sample",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t seed) {
        return split_dict(split_out_of_sample(from_arrays(X, y), seed));
      },
      py::arg("X"), py::arg("y"), py::arg("seed"));
  m.def(
      "split_out_of_domain",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t seed, double q, double sub) {
        return split_dict(split_out_of_domain(from_arrays(X, y), seed, q, sub));
      },
      py::arg("X"), py::arg("y"), py::arg("seed"), py::arg("quantile") = 0.9, py::arg("subsample") = 0.5);
}
