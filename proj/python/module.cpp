#include "hdcov/block_test.hpp"
#include "hdcov/cov_test.hpp"
#include "hdcov/errors.hpp"
#include "hdcov/estimators.hpp"
#include "hdcov/geneset.hpp"
#include "hdcov/numerics.hpp"
#include "hdcov/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace hdcov;

namespace {

EstimatorMode parse_mode(const std::string& mode) {
    if (mode == "exact") return EstimatorMode::ExactUnbiased;
    if (mode == "centered") return EstimatorMode::CenteredFirstTerm;
    throw std::invalid_argument("mode must be 'exact' or 'centered', got '" + mode + "'");
}

SampleMatrix sample(const RowMatrix& x) { return SampleMatrix(x); }

BlockPartition partition(Index p, std::optional<Index> p1) {
    return p1 ? BlockPartition(*p1, p - *p1) : BlockPartition::halves(p);
}

InnovationSpec innovation(const std::string& kind, double shape, double scale) {
    if (kind == "normal") return InnovationSpec::standard_normal();
    if (kind == "gamma") return InnovationSpec::centered_gamma(shape, scale);
    throw std::invalid_argument("innovation must be 'normal' or 'gamma'");
}

}  // namespace

PYBIND11_MODULE(_hdcov, m) {
    m.doc() = "Two-sample tests for high-dimensional covariance matrices";

    py::register_exception<SampleSizeError>(m, "SampleSizeError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<DegenerateScaleError>(m, "DegenerateScaleError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<CovTestResult>(m, "CovTestResult")
        .def_readonly("t_stat", &CovTestResult::t_stat)
        .def_readonly("sigma0_hat", &CovTestResult::sigma0_hat)
        .def_readonly("l_n", &CovTestResult::l_n)
        .def_readonly("p_value", &CovTestResult::p_value)
        .def_readonly("reject", &CovTestResult::reject)
        .def_readonly("alpha", &CovTestResult::alpha)
        .def_readonly("a1", &CovTestResult::a1)
        .def_readonly("a2", &CovTestResult::a2)
        .def_readonly("c", &CovTestResult::c)
        .def("__repr__", [](const CovTestResult& r) {
            std::ostringstream s;
            s << "CovTestResult(l_n=" << r.l_n << ", p_value=" << r.p_value << ", reject=" << r.reject << ")";
            return s.str();
        });

    py::class_<BlockTestResult>(m, "BlockTestResult")
        .def_readonly("s_stat", &BlockTestResult::s_stat)
        .def_readonly("omega0_sq_hat", &BlockTestResult::omega0_sq_hat)
        .def_readonly("z_stat", &BlockTestResult::z_stat)
        .def_readonly("p_value", &BlockTestResult::p_value)
        .def_readonly("reject", &BlockTestResult::reject)
        .def_readonly("alpha", &BlockTestResult::alpha)
        .def_readonly("u1", &BlockTestResult::u1)
        .def_readonly("u2", &BlockTestResult::u2)
        .def_readonly("w", &BlockTestResult::w)
        .def("__repr__", [](const BlockTestResult& r) {
            std::ostringstream s;
            s << "BlockTestResult(z_stat=" << r.z_stat << ", p_value=" << r.p_value << ", reject=" << r.reject
              << ")";
            return s.str();
        });

    m.def(
        "cov_test",
        [](const RowMatrix& x1, const RowMatrix& x2, double alpha, const std::string& mode) {
            return two_sample_cov_test(sample(x1), sample(x2), alpha, parse_mode(mode));
        },
        py::arg("x1"), py::arg("x2"), py::arg("alpha") = 0.05, py::arg("mode") = "exact",
        "Whole-matrix test of Sigma_1 == Sigma_2; rows are observations.");

    m.def(
        "block_test",
        [](const RowMatrix& x1, const RowMatrix& x2, std::optional<Index> p1, double alpha,
           const std::string& mode) {
            return two_sample_block_test(sample(x1), sample(x2), partition(x1.cols(), p1), alpha,
                                         parse_mode(mode));
        },
        py::arg("x1"), py::arg("x2"), py::arg("p1") = py::none(), py::arg("alpha") = 0.05,
        py::arg("mode") = "exact", "Test of equal off-diagonal blocks; p1 defaults to p // 2.");

    m.def(
        "a_stat", [](const RowMatrix& x, const std::string& mode) { return a_stat(sample(x), parse_mode(mode)); },
        py::arg("x"), py::arg("mode") = "exact");
    m.def(
        "c_stat",
        [](const RowMatrix& x1, const RowMatrix& x2, const std::string& mode) {
            return c_stat(sample(x1), sample(x2), parse_mode(mode));
        },
        py::arg("x1"), py::arg("x2"), py::arg("mode") = "exact");
    m.def(
        "u_stat",
        [](const RowMatrix& x, Index p1, const std::string& mode) {
            return u_stat(sample(x), partition(x.cols(), p1), parse_mode(mode));
        },
        py::arg("x"), py::arg("p1"), py::arg("mode") = "exact");
    m.def(
        "w_stat",
        [](const RowMatrix& x1, const RowMatrix& x2, Index p1, const std::string& mode) {
            return w_stat(sample(x1), sample(x2), partition(x1.cols(), p1), parse_mode(mode));
        },
        py::arg("x1"), py::arg("x2"), py::arg("p1"), py::arg("mode") = "exact");

    m.def("std_normal_cdf", &std_normal_cdf);
    m.def("std_normal_quantile", &std_normal_quantile);
    m.def("bh_fdr", &bh_fdr, py::arg("p_values"), py::arg("q") = 0.05);

    m.def(
        "ma_population_cov", [](const std::vector<double>& coeffs, Index p) { return ma_population_cov({coeffs}, p); },
        py::arg("coeffs"), py::arg("p"));
    m.def(
        "simulate_ma",
        [](std::uint64_t seed, std::uint64_t stream, Index n, Index p, const std::vector<double>& coeffs,
           const std::string& innov, double shape, double scale) {
            RngStream rng(seed, stream);
            return RowMatrix(simulate_ma(rng, n, p, MaModel{coeffs}, innovation(innov, shape, scale)).values());
        },
        py::arg("seed"), py::arg("stream"), py::arg("n"), py::arg("p"), py::arg("coeffs") = std::vector<double>{},
        py::arg("innovation") = "normal", py::arg("shape") = 1.0, py::arg("scale") = 1.0,
        "n x p sample from X_k = Z_k + sum_m coeffs[m-1] Z_{k+m}.");

    m.def(
        "asymptotic_power",
        [](const Matrix& s1, const Matrix& s2, Index n1, Index n2, double alpha) {
            return asymptotic_power(PopulationSpec{s1, s2, std::nullopt, std::nullopt, 0.0, 0.0, n1, n2}, alpha);
        },
        py::arg("sigma1"), py::arg("sigma2"), py::arg("n1"), py::arg("n2"), py::arg("alpha") = 0.05,
        "Leading-order power of the whole-matrix test for normal data.");
    m.def(
        "block_power",
        [](const Matrix& s1, const Matrix& s2, std::optional<Index> p1, Index n1, Index n2, double alpha) {
            return block_power(BlockPopulationSpec{s1, s2, partition(s1.rows(), p1), std::nullopt, std::nullopt,
                                                   0.0, 0.0, n1, n2},
                               alpha);
        },
        py::arg("sigma1"), py::arg("sigma2"), py::arg("p1") = py::none(), py::arg("n1") = 50, py::arg("n2") = 50,
        py::arg("alpha") = 0.05);

    m.def(
        "reproduce_table",
        [](const std::string& table, std::size_t reps, std::uint64_t seed, const std::string& mode,
           std::size_t workers) {
            std::vector<TableRow> result;
            {
                py::gil_scoped_release release;
                result = reproduce_table(parse_table_id(table), reps, seed, parse_mode(mode), workers);
            }
            std::vector<py::dict> rows;
            for (const auto& r : result)
                rows.push_back(py::dict(py::arg("table") = r.table, py::arg("n1") = r.n1, py::arg("n2") = r.n2,
                                        py::arg("p") = r.p, py::arg("kind") = r.kind, py::arg("rate") = r.rate,
                                        py::arg("se") = r.se, py::arg("reps") = r.reps, py::arg("seed") = r.seed));
            return rows;
        },
        py::arg("table"), py::arg("reps") = 1000, py::arg("seed") = 20120101, py::arg("mode") = "exact",
        py::arg("workers") = 1);

    m.def(
        "run_genesets",
        [](const std::string& matrix, const std::string& labels, const std::string& gmt, double fdr,
           double followup_alpha, std::optional<Index> p1, const std::string& mode) {
            const auto data = load_expression_matrix(matrix, format_from_path(matrix), LabelSource::parse(labels));
            PipelineOptions opt;
            opt.fdr_q = fdr;
            opt.followup_alpha = followup_alpha;
            opt.p1 = p1;
            opt.mode = parse_mode(mode);
            std::ostringstream out;
            write_report_json(out, run_pipeline(data, load_gmt(gmt), opt));
            return out.str();
        },
        py::arg("matrix"), py::arg("labels"), py::arg("gmt"), py::arg("fdr") = 0.05,
        py::arg("followup_alpha") = 0.05, py::arg("p1") = py::none(), py::arg("mode") = "exact",
        "Runs the gene-set pipeline and returns the JSON report text.");
}
