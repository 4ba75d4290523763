// Copyright 2026 The CADP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/cli/app.h"
#include "cadp/data/wasserstein.h"
#include "cadp/dpsgd/dpsgd.h"
#include "cadp/flow/checkpoint.h"
#include "cadp/privacy/mechanism.h"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using cadp::numerics::Matrix;

void Check(const absl::Status& s) {
  if (s.ok()) return;
  if (absl::IsInvalidArgument(s) || absl::IsOutOfRange(s)) throw py::value_error(std::string(s.message()));
  if (absl::IsNotFound(s)) throw py::key_error(std::string(s.message()));
  throw std::runtime_error(std::string(s.message()));
}

template <typename T>
T Take(absl::StatusOr<T> v) {
  Check(v.status());
  return *std::move(v);
}

Matrix ToMatrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

Array ToArray(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

// Conditioning defaults to zeros when the model is unconditional.
Matrix Condition(const cadp::flow::FlowModel& model, const Matrix& x, const py::object& c) {
  if (c.is_none()) return Matrix(x.rows(), model.cond_dim());
  return ToMatrix(c.cast<Array>());
}

void CheckShape(const cadp::flow::FlowModel& model, const Matrix& x, const Matrix& c) {
  if (x.cols() != model.dim() || c.cols() != model.cond_dim() || c.rows() != x.rows()) {
    std::ostringstream msg;
    msg << "expected x (n, " << model.dim() << ") and c (n, " << model.cond_dim() << "), got ("
        << x.rows() << ", " << x.cols() << ") and (" << c.rows() << ", " << c.cols() << ")";
    throw py::value_error(msg.str());
  }
}

struct PyFlow {
  cadp::flow::FlowCheckpoint checkpoint;
  const cadp::flow::FlowModel& model() const { return checkpoint.model; }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conditional flow privatization (CADP) core";

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cadp::cli::RunCli(args, out, err);
        }
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr).");

  py::class_<PyFlow>(m, "FlowModel")
      .def_static(
          "load", [](const std::string& path) { return PyFlow{Take(cadp::flow::LoadFlowCheckpoint(path))}; },
          py::arg("path"))
      .def_property_readonly("dim", [](const PyFlow& f) { return f.model().dim(); })
      .def_property_readonly("cond_dim", [](const PyFlow& f) { return f.model().cond_dim(); })
      .def_property_readonly("volume_preserving", [](const PyFlow& f) { return f.model().volume_preserving(); })
      .def_property_readonly("final_nll", [](const PyFlow& f) { return f.checkpoint.metadata.final_nll; })
      .def(
          "encode",
          [](const PyFlow& f, const Array& x, const py::object& c) {
            const Matrix xm = ToMatrix(x), cm = Condition(f.model(), xm, c);
            CheckShape(f.model(), xm, cm);
            return ToArray(f.model().Encode(xm, cm));
          },
          py::arg("x"), py::arg("c") = py::none())
      .def(
          "decode",
          [](const PyFlow& f, const Array& z, const py::object& c) {
            const Matrix zm = ToMatrix(z), cm = Condition(f.model(), zm, c);
            CheckShape(f.model(), zm, cm);
            return ToArray(f.model().Inverse(zm, cm));
          },
          py::arg("z"), py::arg("c") = py::none())
      .def(
          "log_likelihood",
          [](const PyFlow& f, const Array& x, const py::object& c) {
            const Matrix xm = ToMatrix(x), cm = Condition(f.model(), xm, c);
            CheckShape(f.model(), xm, cm);
            return f.model().LogLikelihoodValues(xm, cm);
          },
          py::arg("x"), py::arg("c") = py::none());

  m.def(
      "privatize",
      [](const PyFlow& f, const Array& x, const py::object& c, double epsilon, double sensitivity,
         const std::string& clip_mode, uint64_t seed, bool add_noise) {
        cadp::privacy::PrivacyParams params;
        params.epsilon = epsilon;
        params.sensitivity = sensitivity;
        params.clip_mode = Take(cadp::privacy::ParseClipMode(clip_mode));
        Check(params.Validate());
        const Matrix xm = ToMatrix(x), cm = Condition(f.model(), xm, c);
        CheckShape(f.model(), xm, cm);
        cadp::privacy::PrivatizeOutput out =
            Take(cadp::privacy::CadpPrivatize(f.model(), xm, cm, params, seed, add_noise));
        return std::make_tuple(ToArray(out.x), out.warnings);
      },
      py::arg("model"), py::arg("x"), py::arg("c") = py::none(), py::arg("epsilon"),
      py::arg("sensitivity"), py::arg("clip_mode") = "rescale_always", py::arg("seed") = 0,
      py::arg("add_noise") = true,
      "Returns (privatized rows, warnings). Rows with a zero latent raise RuntimeError.");

  m.def(
      "clip_l1",
      [](const Array& z, double s, const std::string& mode) {
        Matrix zm = ToMatrix(z);
        const auto clip = Take(cadp::privacy::ParseClipMode(mode));
        for (std::size_t i = 0; i < zm.rows(); ++i) Check(cadp::privacy::ClipL1(zm.row(i), s, clip));
        return ToArray(zm);
      },
      py::arg("z"), py::arg("s"), py::arg("mode") = "rescale_always");

  m.def(
      "sensitivity",
      [](const std::string& rule, double epsilon, double fixed) {
        return cadp::privacy::ApplySensitivityRule(Take(cadp::privacy::ParseSensitivityRule(rule)),
                                                   epsilon, fixed);
      },
      py::arg("rule"), py::arg("epsilon"), py::arg("fixed") = 1.0);

  m.def(
      "dpsgd_epsilon",
      [](double sigma, std::size_t lot, std::size_t n, std::size_t steps, double delta) {
        const auto r = Take(cadp::dpsgd::SimpleAccountant(sigma, lot, n, steps, delta));
        py::dict d;
        d["epsilon"] = r.epsilon;
        d["basic"] = r.basic;
        d["advanced"] = r.advanced;
        d["vacuous"] = r.vacuous;
        return d;
      },
      py::arg("noise_multiplier"), py::arg("lot_size"), py::arg("dataset_size"), py::arg("steps"),
      py::arg("delta") = 1e-5);

  m.def(
      "calibrate_noise_multiplier",
      [](double epsilon, std::size_t lot, std::size_t n, std::size_t steps, double delta) {
        return Take(cadp::dpsgd::CalibrateNoiseMultiplier(epsilon, lot, n, steps, delta));
      },
      py::arg("epsilon"), py::arg("lot_size"), py::arg("dataset_size"), py::arg("steps"),
      py::arg("delta") = 1e-5);

  m.def(
      "wasserstein1",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.empty() || b.empty()) throw py::value_error("empty sample");
        return cadp::data::Wasserstein1(a, b);
      },
      py::arg("a"), py::arg("b"));
}
