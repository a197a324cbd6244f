#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "bdsvie/catalog.hpp"
#include "bdsvie/certificate.hpp"
#include "bdsvie/cli.hpp"
#include "bdsvie/expression.hpp"
#include "bdsvie/run_config.hpp"
#include "bdsvie/verification.hpp"

namespace py = pybind11;
using namespace bdsvie;

namespace {

py::array_t<double> driver_array(const BrownianEnsemble& ens, bool w) {
    const int M = ens.n_paths();
    const int nodes = ens.grid().n_nodes();
    const int dim = w ? ens.dim_w() : ens.dim_b();
    py::array_t<double> arr({M, nodes, dim});
    auto view = arr.mutable_unchecked<3>();
    for (int i = 0; i < nodes; ++i)
        for (int m = 0; m < M; ++m)
            for (int c = 0; c < dim; ++c)
                view(m, i, c) = w ? ens.w(i, m, c) : ens.b(i, m, c);
    return arr;
}

py::dict solution_to_dict(const SolutionEstimate& sol) {
    const TimeGrid& grid = sol.y.grid();
    py::dict out;
    py::array_t<double> t(grid.n_nodes());
    py::array_t<double> y_mean({grid.n_nodes(), sol.y.dim()});
    auto tv = t.mutable_unchecked<1>();
    auto yv = y_mean.mutable_unchecked<2>();
    for (int i = 0; i <= grid.n_steps; ++i) {
        tv(i) = grid.at(i);
        const auto block = sol.y.at(i);
        for (int a = 0; a < sol.y.dim(); ++a) yv(i, a) = block.col(a).mean();
    }
    out["t"] = t;
    out["y_mean"] = y_mean;
    py::list residuals;
    for (const IntervalStats& st : sol.intervals) {
        py::dict d;
        d["s_lo"] = st.s_lo;
        d["s_hi"] = st.s_hi;
        d["iterations"] = st.iterations;
        d["converged"] = st.converged;
        d["residuals"] = st.residuals;
        residuals.append(d);
    }
    out["intervals"] = residuals;
    out["converged"] = sol.converged;
    return out;
}

py::object json_loads(const std::string& text) {
    return py::module_::import("json").attr("loads")(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Monte Carlo solver for backward doubly stochastic Volterra integral equations";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const std::invalid_argument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const std::out_of_range& e) {
            PyErr_SetString(PyExc_IndexError, e.what());
        }
    });

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init([](double T, int N) { return make_grid(T, N); }), py::arg("T"),
             py::arg("N"))
        .def_readonly("start", &TimeGrid::start)
        .def_readonly("end", &TimeGrid::end)
        .def_readonly("n_steps", &TimeGrid::n_steps)
        .def_readonly("dt", &TimeGrid::dt)
        .def_readonly("times", &TimeGrid::times)
        .def("index_of", &TimeGrid::index_of);

    py::class_<BrownianEnsemble>(m, "BrownianEnsemble")
        .def_property_readonly("n_paths", &BrownianEnsemble::n_paths)
        .def_property_readonly("dim_w", &BrownianEnsemble::dim_w)
        .def_property_readonly("dim_b", &BrownianEnsemble::dim_b)
        .def_property_readonly("seed", &BrownianEnsemble::seed)
        .def_property_readonly("grid", &BrownianEnsemble::grid)
        .def_property_readonly("w", [](const BrownianEnsemble& e) { return driver_array(e, true); })
        .def_property_readonly("b",
                               [](const BrownianEnsemble& e) { return driver_array(e, false); })
        .def("__eq__", [](const BrownianEnsemble& a, const BrownianEnsemble& b) { return a == b; });

    m.def(
        "sample_ensemble",
        [](const TimeGrid& grid, int M, int d, int l, std::uint64_t seed, int threads) {
            py::gil_scoped_release release;
            return sample_ensemble(grid, M, d, l, seed, threads);
        },
        py::arg("grid"), py::arg("M"), py::arg("d") = 1, py::arg("l") = 1, py::arg("seed") = 42,
        py::arg("threads") = 1);

    py::class_<ContractionCertificate>(m, "ContractionCertificate")
        .def_readonly("C", &ContractionCertificate::lip_c)
        .def_readonly("alpha", &ContractionCertificate::alpha)
        .def_readonly("T", &ContractionCertificate::horizon)
        .def_readonly("theta", &ContractionCertificate::theta)
        .def_readonly("a", &ContractionCertificate::a)
        .def_readonly("lambda_factor", &ContractionCertificate::lambda_factor)
        .def_readonly("max_step", &ContractionCertificate::max_step)
        .def_readonly("partition", &ContractionCertificate::partition)
        .def("to_json", [](const ContractionCertificate& c) { return json_loads(c.to_json().dump()); });

    m.def(
        "build_certificate",
        [](double C, double alpha, double T, py::object theta, py::object a,
           py::object partition) {
            CertificateOverrides ov;
            if (!theta.is_none()) ov.theta = theta.cast<double>();
            if (!a.is_none()) ov.a = a.cast<double>();
            if (!partition.is_none()) ov.partition = partition.cast<std::vector<double>>();
            return build_certificate(C, alpha, T, ov);
        },
        py::arg("C"), py::arg("alpha"), py::arg("T"), py::arg("theta") = py::none(),
        py::arg("a") = py::none(), py::arg("partition") = py::none());

    m.def("catalog_names", &catalog_names);

    m.def(
        "validate_expression",
        [](const std::string& text, const std::string& slot, int k, int d, int l) {
            ExprSlot s = slot == "f"    ? ExprSlot::F
                         : slot == "g"  ? ExprSlot::G
                         : slot == "xi" ? ExprSlot::Xi
                                        : throw std::invalid_argument("slot must be f, g or xi");
            return ExpressionAst::parse(text, s, ExprDims{k, d, l}).pretty();
        },
        py::arg("text"), py::arg("slot"), py::arg("k") = 1, py::arg("d") = 1, py::arg("l") = 1,
        "Parses an expression and returns its canonical form; raises ValueError on errors.");

    m.def(
        "solve_catalog",
        [](const std::string& name, int N, int M, int degree, std::uint64_t seed, double tol,
           int max_iter, int threads) {
            py::dict result;
            {
                py::gil_scoped_release release;
                const CatalogEntry entry = catalog_problem(name);
                const TimeGrid grid = make_grid(entry.spec.T, N);
                const BrownianEnsemble ens =
                    sample_ensemble(grid, M, entry.spec.d, entry.spec.l, seed, threads);
                const RegressionContext reg(ens, degree);
                const ContractionCertificate cert =
                    build_certificate(entry.spec.lip_c, entry.spec.alpha, entry.spec.T);
                SolverConfig cfg;
                cfg.tol = tol;
                cfg.max_iter = max_iter;
                cfg.threads = threads;
                const SolutionEstimate sol = stitched_solve(entry.spec, ens, reg, cert, cfg);
                py::gil_scoped_acquire acquire;
                result = solution_to_dict(sol);
                result["certificate"] = json_loads(cert.to_json().dump());
            }
            return result;
        },
        py::arg("name"), py::arg("N") = 32, py::arg("M") = 8192, py::arg("degree") = 2,
        py::arg("seed") = 42, py::arg("tol") = 1e-4, py::arg("max_iter") = 25,
        py::arg("threads") = 1);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a CLI command in-process; returns (exit_code, stdout, stderr).");

    m.attr("__version__") = "0.1.0";
}
