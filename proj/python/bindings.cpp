#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "secantboost/booster.hpp"
#include "secantboost/bregman.hpp"
#include "secantboost/data_io.hpp"
#include "secantboost/error.hpp"
#include "secantboost/model_io.hpp"
#include "secantboost/offset_oracle.hpp"
#include "secantboost/quantum_calculus.hpp"

namespace py = pybind11;
using namespace secantboost;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<int, py::array::c_style | py::array::forcecast>;

Dataset dataset_from_arrays(const Matrix& X, std::optional<Labels> y) {
  if (X.ndim() != 2) throw std::invalid_argument("X must be a 2-d array");
  const auto n = static_cast<std::size_t>(X.shape(0));
  const auto d = static_cast<std::size_t>(X.shape(1));
  auto x = X.unchecked<2>();
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) rows[i][j] = x(i, j);
  std::vector<int> labels(n, 1);
  if (y) {
    if (y->ndim() != 1 || static_cast<std::size_t>(y->shape(0)) != n)
      throw std::invalid_argument("y must be a 1-d array with one label per row of X");
    auto yy = y->unchecked<1>();
    for (std::size_t i = 0; i < n; ++i) labels[i] = yy(i);
  }
  return Dataset::from_numeric(rows, std::move(labels));
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

struct TrainedModel {
  Model model;
  BoostResult result;

  std::vector<double> predict(const Dataset& S) const { return model.ensemble.predict_all(S); }
};

py::dict telemetry_dict(const std::vector<TelemetryRow>& rows) {
  std::vector<double> loss, err, eta, alpha, w2;
  std::vector<std::string> stop;
  for (const TelemetryRow& r : rows) {
    loss.push_back(r.train_loss);
    err.push_back(r.train_err);
    eta.push_back(r.eta);
    alpha.push_back(r.alpha);
    w2.push_back(r.w2_bar);
    stop.push_back(std::string(to_string(r.stop_reason)));
  }
  py::dict d;
  d["train_loss"] = to_array(loss);
  d["train_err"] = to_array(err);
  d["eta"] = to_array(eta);
  d["alpha"] = to_array(alpha);
  d["w2_bar"] = to_array(w2);
  d["stop_reason"] = stop;
  return d;
}

TrainedModel train(const Loss& f, const Dataset& S, const RunConfig& rc) {
  rc.validate();
  TrainedModel out;
  out.result = run(f, S, rc.boost_config());
  out.model.ensemble = out.result.ensemble;
  out.model.config = rc;
  out.model.v0 = out.result.v0;
  out.model.schema = schema_of(S);
  out.model.loss_table.assign(f.table().begin(), f.table().end());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Boosting with secant-based weights: losses, secant derivatives and the booster.";

  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<ConstantLossError>(m, "ConstantLossError", PyExc_RuntimeError);

  py::class_<Loss>(m, "Loss")
      .def(py::init([](const std::string& name, const std::map<std::string, double>& params) {
             return make_builtin(name, params);
           }),
           py::arg("name"), py::arg("params") = std::map<std::string, double>{})
      .def("__call__", &Loss::operator(), py::arg("z"))
      .def_property_readonly("name", &Loss::name)
      .def_property_readonly("convex", &Loss::is_convex)
      .def_property_readonly("smoothness", &Loss::smoothness_beta)
      .def("__repr__", [](const Loss& f) { return "<Loss " + f.name() + ">"; });

  m.def("builtin_losses", &builtin_loss_names);
  m.def("loss_table", [](std::vector<std::pair<double, double>> points) { return make_piecewise_linear(std::move(points)); },
        py::arg("points"));

  m.def("v_derivative", [](const Loss& f, double z, double v) { return v_derivative(f, z, v); }, py::arg("loss"),
        py::arg("z"), py::arg("v"));
  m.def("v_derivative", [](const Loss& f, double z, std::vector<double> offsets) {
    return v_derivative(f, z, OffsetList(std::move(offsets)));
  }, py::arg("loss"), py::arg("z"), py::arg("offsets"));

  m.def("obi", [](const Loss& f, double a, double b, double c, std::size_t grid_points) {
    return obi(f, ObiQuery{a, b, c, grid_points});
  }, py::arg("loss"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("grid_points") = kDefaultGridPoints);
  m.def("q_star", &q_star, py::arg("loss"), py::arg("z"), py::arg("zp"), py::arg("v"),
        py::arg("grid_points") = kDefaultGridPoints);
  m.def("bregman_secant", &bregman_secant, py::arg("loss"), py::arg("zp"), py::arg("z"), py::arg("v"));
  m.def("find_offset", [](const Loss& f, double e_t, double e_prev, double z_limit, std::size_t precision_Z,
                          std::size_t max_retries) {
    return find_offset(f, {e_t, e_prev, z_limit, precision_Z, max_retries});
  }, py::arg("loss"), py::arg("e_t"), py::arg("e_prev"), py::arg("z_limit"), py::arg("precision_Z") = 64,
        py::arg("max_retries") = 5);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&dataset_from_arrays), py::arg("X"), py::arg("y"))
      .def_property_readonly("size", &Dataset::size)
      .def_property_readonly("num_features", &Dataset::num_features)
      .def_property_readonly("labels", [](const Dataset& S) {
        return py::array_t<int>(static_cast<py::ssize_t>(S.size()), S.labels().data());
      })
      .def("__len__", &Dataset::size);

  m.def("load_csv", [](const std::string& path, const std::string& label_column) {
    return load_csv(path, {.label_column = label_column});
  }, py::arg("path"), py::arg("label_column") = "");

  py::class_<TrainedModel>(m, "Model")
      .def("predict", [](const TrainedModel& tm, const Dataset& S) { return to_array(tm.predict(S)); },
           py::arg("data"))
      .def("predict", [](const TrainedModel& tm, const Matrix& X) {
        return to_array(tm.predict(dataset_from_arrays(X, std::nullopt)));
      }, py::arg("X"))
      .def("error", [](const TrainedModel& tm, const Dataset& S) {
        return zero_one_error(margins(S, tm.predict(S)));
      }, py::arg("data"))
      .def("save", [](const TrainedModel& tm, const std::string& path) { save_model(tm.model, path); }, py::arg("path"))
      .def_property_readonly("h0", [](const TrainedModel& tm) { return tm.model.ensemble.h0; })
      .def_property_readonly("num_terms", [](const TrainedModel& tm) { return tm.model.ensemble.terms.size(); })
      .def_property_readonly("F0", [](const TrainedModel& tm) { return tm.result.F0; })
      .def_property_readonly("stop_reason",
                             [](const TrainedModel& tm) { return std::string(to_string(tm.result.stop_reason)); })
      .def_property_readonly("telemetry", [](const TrainedModel& tm) { return telemetry_dict(tm.result.telemetry); });

  m.def("train", [](const Dataset& S, const std::string& loss, const std::map<std::string, double>& loss_params,
                    std::size_t T, std::size_t max_nodes, double delta_init, double epsilon, std::uint64_t seed) {
    RunConfig rc;
    rc.loss = loss;
    rc.loss_params = loss_params;
    rc.T = T;
    rc.max_nodes = max_nodes;
    rc.delta_init = delta_init;
    rc.epsilon = epsilon;
    rc.seed = seed;
    return train(rc.make_loss(), S, rc);
  }, py::arg("data"), py::arg("loss") = "logistic", py::arg("loss_params") = std::map<std::string, double>{},
        py::arg("T") = 50, py::arg("max_nodes") = 1, py::arg("delta_init") = 1.0, py::arg("epsilon") = 0.1,
        py::arg("seed") = 0);
}
