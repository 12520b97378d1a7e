// Copyright 2026 The qkdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qkdlab/analysis.h"
#include "qkdlab/batch.h"
#include "qkdlab/codes.h"
#include "qkdlab/config.h"
#include "qkdlab/protocol.h"
#include "qkdlab/source.h"

namespace py = pybind11;
using namespace qkdlab;

namespace {

ComplexMatrix matrix_from_rows(const std::vector<std::vector<Complex>> &rows) {
    ComplexMatrix m(rows.size());
    for (size_t r = 0; r < rows.size(); r++) {
        if (rows[r].size() != rows.size()) {
            throw std::invalid_argument("matrix must be square");
        }
        for (size_t c = 0; c < rows.size(); c++) {
            m(r, c) = rows[r][c];
        }
    }
    return m;
}

py::dict certificate_dict(const CertificateReport &report) {
    py::dict residuals;
    for (const auto &c : report.conditions) {
        residuals[py::str(c.name)] = c.residual;
    }
    py::dict d;
    d["residuals"] = residuals;
    d["beta_qp"] = report.recomputed_beta;
    d["gamma_qp"] = report.recomputed_gamma;
    d["passed"] = report.passed;
    return d;
}

/// Runs `sessions` sessions from a JSON config and returns the CSV table.
std::string simulate_csv(const std::string &config, uint64_t seed, std::optional<size_t> sessions) {
    SimulationConfig cfg = simulation_from_json(parse_json(config), seed);
    size_t count = sessions.value_or(cfg.sessions);
    auto outcomes = parallel_map(count, [&](size_t i) {
        ProtocolParams local = cfg.params;
        local.seed = session_seed(seed, i);
        return run_session(local, cfg.source.source, cfg.channel, cfg.attack, cfg.options);
    });
    std::string csv = session_csv_header() + "\n";
    for (size_t i = 0; i < count; i++) {
        csv += session_csv_row(session_seed(seed, i), outcomes[i]) + "\n";
    }
    return csv;
}

}  // namespace

PYBIND11_MODULE(_qkdlab, m) {
    m.doc() = "BB84 with quasiperfect sources: simulation, codes, attacks and bounds.";
    m.attr("__version__") = "0.1.0";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("binary_entropy", &binary_entropy, py::arg("x"));
    m.def("asymptotic_rate", &asymptotic_rate, py::arg("delta_p"), py::arg("eps"), py::arg("beta_qp"),
          py::arg("gamma_qp"));

    m.def(
        "verify_ideal_source", [] {
            CertifiedSource s = ideal_bb84_source();
            return certificate_dict(verify_certificate(s.source, s.certificate));
        },
        "Certificate report for the ideal BB84 source.");
    m.def(
        "verify_source_json",
        [](const std::string &text) {
            SourceConfig cfg = source_from_json(parse_json(text));
            return certificate_dict(verify_certificate(cfg.source.source, cfg.source.certificate, cfg.tolerance));
        },
        py::arg("description"), "Builds a source from a JSON description and verifies its certificate.");

    m.def(
        "helstrom_bound",
        [](const std::vector<std::vector<Complex>> &rho0, const std::vector<std::vector<Complex>> &rho1, size_t k) {
            return helstrom_bound(DensityMatrix(matrix_from_rows(rho0)), DensityMatrix(matrix_from_rows(rho1)), k);
        },
        py::arg("rho0"), py::arg("rho1"), py::arg("m") = 1);

    m.def(
        "gv_code",
        [](size_t n, size_t t, uint64_t seed) {
            LinearCode code = gilbert_varshamov_construct(n, t, seed);
            py::dict d;
            d["n"] = code.n();
            d["r"] = code.r();
            d["t_max"] = code.t_max();
            d["rows"] = code.parity_check().to_strings();
            if (n <= kMinDistanceCap) {
                d["min_distance"] = code.min_distance_exhaustive();
            }
            return d;
        },
        py::arg("n"), py::arg("t"), py::arg("seed"));
    m.def(
        "syndrome_decode",
        [](const std::vector<std::string> &rows, size_t t_max, const std::string &y, const std::string &s) {
            LinearCode code(Gf2Matrix::from_strings(rows), t_max);
            return syndrome_decode(BitString::from_string(y), BitString::from_string(s), code).str();
        },
        py::arg("rows"), py::arg("t_max"), py::arg("y"), py::arg("syndrome"));

    m.def(
        "binomial_tail",
        [](double p, double r, double t, size_t n_r, size_t n_p, bool upper) {
            TailResult res =
                binomial_tail_bound(p, r, t, n_r, n_p, upper ? TailSide::kUpper : TailSide::kLower);
            return py::make_tuple(res.exact, res.bound, res.holds);
        },
        py::arg("p"), py::arg("r"), py::arg("t"), py::arg("n_r"), py::arg("n_p"), py::arg("upper") = true,
        "Returns (exact, bound, holds).");
    m.def("reliability_bound", &reliability_bound, py::arg("n"), py::arg("eps"), py::arg("delta_p"));
    m.def(
        "eps1",
        [](size_t n, size_t key_bits, double eps) { return privacy_bookkeeping(n, key_bits, eps).eps1; },
        py::arg("n"), py::arg("m"), py::arg("eps"));

    m.def("simulate_csv", &simulate_csv, py::arg("config"), py::arg("seed"), py::arg("sessions") = py::none(),
          py::call_guard<py::gil_scoped_release>(),
          "Runs seeded sessions from a JSON config and returns the per-session CSV.");
}
