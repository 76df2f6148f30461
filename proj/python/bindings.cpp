#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>

#include "lrexp/analysis.hpp"
#include "lrexp/expectile.hpp"
#include "lrexp/factor_model.hpp"
#include "lrexp/fit.hpp"
#include "lrexp/ingest.hpp"
#include "lrexp/simulate.hpp"

namespace py = pybind11;
using namespace lrexp;

namespace {

// NaN marks a missing cell on the Python side.
MaskedMatrix from_array(const Matrix& x) { return MaskedMatrix::from_nan(x); }

py::dict info_dict(const NormalizationInfo& info) {
  py::dict d;
  d["mean"] = info.mean;
  d["std"] = info.std;
  d["row_means"] = info.row_means;
  d["col_means"] = info.col_means;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Low-rank expectile factor models";
  py::register_exception<Error>(m, "LrexpError", PyExc_ValueError);

  py::class_<FactorModel>(m, "FactorModel")
      .def(py::init([](Vector r, Vector c, Matrix u, Matrix v) {
             FactorModel fm{std::move(r), std::move(c), std::move(u), std::move(v)};
             fm.check_shape();
             return fm;
           }),
           py::arg("r"), py::arg("c"), py::arg("u"), py::arg("v"))
      .def_readwrite("r", &FactorModel::r)
      .def_readwrite("c", &FactorModel::c)
      .def_readwrite("u", &FactorModel::u)
      .def_readwrite("v", &FactorModel::v)
      .def_property_readonly("rank", &FactorModel::rank)
      .def("fitted", [](const FactorModel& fm) { return fitted_matrix(fm); })
      .def("flatten", [](const FactorModel& fm) { return flatten(fm); });

  m.def(
      "scalar_expectile",
      [](const std::vector<double>& sample, double tau) { return scalar_expectile(sample, Tau(tau)); },
      py::arg("sample"), py::arg("tau"));
  m.def(
      "expectile_curves",
      [](const Matrix& x, const std::vector<double>& taus) {
        return marginal_expectile_curves(from_array(x), make_taus(taus));
      },
      py::arg("x"), py::arg("taus"), "Per-row expectiles of the observed entries, one column per tau.");

  m.def(
      "loss_and_gradient",
      [](const FactorModel& fm, const Matrix& x, double tau) {
        const LossValue lv = loss_and_gradient(fm, from_array(x), Tau(tau));
        return py::make_tuple(lv.loss, lv.gradient);
      },
      py::arg("model"), py::arg("x"), py::arg("tau"));
  m.def(
      "canonicalize", [](const FactorModel& fm) { return canonicalize(fm).model; }, py::arg("model"));

  m.def(
      "normalize",
      [](const Matrix& x) {
        const NormalizedMatrix nm = normalize(from_array(x));
        return py::make_tuple(nm.matrix.to_nan_matrix(), info_dict(nm.info));
      },
      py::arg("x"));

  m.def(
      "simulate",
      [](Index rows, Index cols, Index true_rank, double sigma, double na_portion, std::uint64_t seed) {
        SimulationSpec spec;
        spec.rows = rows;
        spec.cols = cols;
        spec.true_rank = true_rank;
        spec.sigma = sigma;
        spec.na_portion = na_portion;
        spec.seed = seed;
        const SimulatedData data = generate(spec);
        py::dict d;
        d["x"] = data.x.to_nan_matrix();
        d["r"] = data.true_r;
        d["c"] = data.true_c;
        d["u"] = data.true_u;
        d["v"] = data.true_v;
        d["sigma_new"] = normalized_noise_std(data);
        return d;
      },
      py::arg("rows") = 200, py::arg("cols") = 200, py::arg("true_rank") = 2, py::arg("sigma") = 0.3,
      py::arg("na_portion") = 0.3, py::arg("seed") = 0);

  m.def(
      "fit",
      [](const Matrix& x, double tau, Index rank, const std::string& algorithm, int restarts, std::uint64_t seed,
         bool normalize_input, std::optional<Index> orient_pivot, double grad_tol, int max_iters, int threads) {
        const MaskedMatrix raw = from_array(x);
        NormalizedMatrix data;
        if (normalize_input) {
          data = normalize(raw);
        } else {
          data.matrix = raw;
          data.info.row_means = observed_row_means(raw);
          data.info.col_means = observed_col_means(raw);
        }
        FitConfig config;
        config.tau = Tau(tau);
        config.rank = rank;
        config.opts.algorithm = parse_algorithm(algorithm);
        config.opts.grad_tol = grad_tol;
        config.opts.max_iters = max_iters;
        config.n_restarts = restarts;
        config.seed = seed;
        config.orient_pivot = orient_pivot;
        config.threads = threads;
        FitReport rep;
        {
          py::gil_scoped_release release;
          rep = fit(data.matrix, data.info.row_means, data.info.col_means, config);
        }
        py::dict d;
        d["model"] = rep.model;
        d["final_loss"] = rep.final_loss;
        d["iterations"] = rep.iterations;
        d["function_evals"] = rep.function_evals;
        d["status"] = std::string(to_string(rep.status));
        d["restart_losses"] = rep.restart_losses;
        d["warnings"] = rep.warnings;
        d["normalization"] = info_dict(data.info);
        return d;
      },
      py::arg("x"), py::arg("tau") = 0.5, py::arg("rank") = 1, py::arg("algorithm") = "lbfgs",
      py::arg("restarts") = 1, py::arg("seed") = 0, py::arg("normalize") = true, py::arg("orient_pivot") = py::none(),
      py::arg("grad_tol") = 1e-6, py::arg("max_iters") = 500, py::arg("threads") = 1,
      "Fits R 1' + 1 C' + U V' to x (NaN = missing) under the asymmetric squared loss.");

  m.def(
      "icc",
      [](const std::vector<double>& values, const std::vector<std::int64_t>& groups) {
        return icc(GroupedSeries{values, groups});
      },
      py::arg("values"), py::arg("groups"));

  m.def(
      "ingest_heart_rate",
      [](const std::string& path, bool kaggle, double max_missing) {
        std::ifstream in(path);
        if (!in) fail(ErrorCode::Io, "cannot open " + path);
        const auto records = read_records(in, kaggle ? kaggle_ingest_options() : IngestOptions{});
        const PersonDayMatrix pdm = bin_records(records);
        const FilteredPersonDays f = filter_and_normalize(pdm, max_missing);
        std::vector<std::pair<std::string, std::string>> labels;
        for (const auto& l : f.labels) labels.emplace_back(l.person_id, l.date.iso());
        py::dict d;
        d["binned"] = pdm.matrix.to_nan_matrix();
        d["x"] = f.data.matrix.to_nan_matrix();
        d["labels"] = labels;
        d["kept"] = f.kept;
        d["normalization"] = info_dict(f.data.info);
        return d;
      },
      py::arg("path"), py::arg("kaggle") = false, py::arg("max_missing") = 0.7);
}
