#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ffm/chargroup.hpp"
#include "ffm/config.hpp"
#include "ffm/errors.hpp"
#include "ffm/ffpoly.hpp"
#include "ffm/lfunc.hpp"
#include "ffm/moments.hpp"
#include "ffm/primesums.hpp"
#include "ffm/suites.hpp"

namespace py = pybind11;
using namespace ffm;

namespace {

FqPoly poly(std::uint32_t q, const std::string& s) { return parse_poly(FieldSpec(q), s); }

ShiftSpec shifts(const std::vector<double>& a, const std::vector<double>& t) { return ShiftSpec(a, t); }

py::dict ratio_dict(const RatioReport& r) {
    py::dict d;
    d["moment"] = r.moment;
    d["normaliser"] = r.normaliser;
    d["ratio"] = r.ratio;
    return d;
}

// primitive family of one modulus, kept together with its group
struct Family {
    PrimitiveFamily fam;

    Family(std::uint32_t q, const std::string& Q)
        : fam(primitive_family(std::make_shared<const UnitGroup>(unit_group(factor_modulus(poly(q, Q)))), kProbeDegrees)) {}

    const Modulus& modulus() const { return fam.modulus(); }
};

py::dict check_dict(const CheckRow& r) {
    py::dict d;
    d["suite"] = r.suite;
    d["check"] = r.check;
    d["anchor"] = r.anchor;
    d["subject"] = r.subject;
    d["pass"] = r.pass;
    d["measured"] = r.measured;
    d["reference"] = r.reference;
    d["detail"] = r.detail;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dirichlet L-functions over F_q[T]: polynomials, characters, L-polynomials, moments, prime sums";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.def("normalize", [](std::uint32_t q, const std::string& s) { return to_string(poly(q, s)); }, py::arg("q"),
          py::arg("poly"));
    m.def("is_irreducible", [](std::uint32_t q, const std::string& s) { return is_irreducible(poly(q, s)); });
    m.def("irreducibles", [](std::uint32_t q, int n) {
        std::vector<std::string> out;
        for (const auto& f : enumerate_irreducible(FieldSpec(q), n)) out.push_back(to_string(f));
        return out;
    });
    m.def("prime_count", [](std::uint32_t q, int n) { return prime_count_exact(FieldSpec(q), n); });
    m.def("prime_count_sieve", [](std::uint32_t q, int n) { return count_irreducible_by_sieve(FieldSpec(q), n); });
    m.def("factor", [](std::uint32_t q, const std::string& Q) {
        std::vector<std::pair<std::string, int>> out;
        const auto mod = factor_modulus(poly(q, Q));
        for (const auto& pp : mod.factors()) out.emplace_back(to_string(pp.prime), pp.exponent);
        return out;
    });

    py::class_<Family>(m, "Family")
        .def(py::init<std::uint32_t, const std::string&>(), py::arg("q"), py::arg("modulus"))
        .def_property_readonly("modulus", [](const Family& f) { return to_string(f.modulus().poly()); })
        .def_property_readonly("q", [](const Family& f) { return f.modulus().field().q(); })
        .def_property_readonly("phi", [](const Family& f) { return f.modulus().phi(); })
        .def("__len__", [](const Family& f) { return f.fam.size(); })
        .def_property_readonly("char_indices", [](const Family& f) {
            std::vector<std::uint64_t> out;
            for (const auto& L : f.fam.lpolys) out.push_back(L.char_index);
            return out;
        })
        .def("lpolys", [](const Family& f) {
            std::vector<std::vector<cplx>> out;
            for (const auto& L : f.fam.lpolys) out.push_back(L.coeffs);
            return out;
        })
        .def("inverse_roots", [](const Family& f, std::size_t i) { return l_inverse_roots(f.fam.lpolys.at(i)); })
        .def("l_value", [](const Family& f, std::size_t i, double t) { return l_value(f.fam.lpolys.at(i), t); })
        .def("shifted_moment",
             [](const Family& f, const std::vector<double>& a, const std::vector<double>& t) {
                 return shifted_moment(f.fam, shifts(a, t));
             },
             py::arg("a"), py::arg("t"))
        .def("moment_report",
             [](const Family& f, const std::vector<double>& a, const std::vector<double>& t) {
                 const auto r = moment_report(f.fam, shifts(a, t));
                 py::dict d;
                 d["lhs"] = r.lhs;
                 d["rhs_zeta"] = r.rhs_zeta;
                 d["rhs_min"] = r.rhs_min;
                 d["ratio_zeta"] = r.ratio_zeta;
                 d["ratio_min"] = r.ratio_min;
                 d["crude_exponent"] = r.crude_exponent;
                 d["n_primitive"] = r.n_primitive;
                 return d;
             },
             py::arg("a"), py::arg("t"))
        .def("charsum_moment",
             [](const Family& f, double mm, int y_degree) { return ratio_dict(charsum_moment(f.fam, mm, NormCutoff(y_degree))); },
             py::arg("m"), py::arg("y_degree"))
        .def("circle_integral",
             [](const Family& f, std::size_t i, int quad_points) { return circle_integral(f.fam.lpolys.at(i), quad_points); },
             py::arg("index"), py::arg("quad_points") = 1024)
        .def("integral_moment",
             [](const Family& f, double mm, int quad_points) { return ratio_dict(integral_moment(f.fam, mm, quad_points)); },
             py::arg("m"), py::arg("quad_points") = 1024)
        .def("perron", [](const Family& f, std::size_t i, int N, double r, int M) {
            const auto res = perron_partial_sum(f.fam.lpolys.at(i), N, r, M);
            return std::make_pair(res.quadrature, res.direct);
        });

    m.def("mertens_cos_sum", [](std::uint32_t q, int h, double alpha) {
        return mertens_cos_sum(PrimeTable(FieldSpec(q), h, 0), NormCutoff(h), alpha);
    });
    m.def("zeta_log_estimate", [](std::uint32_t q, int h, double alpha) {
        return zeta_log_estimate(FieldSpec(q), NormCutoff(h), alpha);
    });
    m.def("log_min_estimate", [](std::uint32_t q, int h, double alpha) {
        return log_min_estimate(FieldSpec(q), NormCutoff(h), alpha);
    });
    m.def("F_sum", &F_sum, py::arg("h"), py::arg("theta"));
    m.def("prime_power_tail", [](std::uint32_t q, int h) {
        const auto t = prime_power_tail(PrimeTable(FieldSpec(q), 8 * h, 0), NormCutoff(h));
        py::dict d;
        d["head"] = t.head;
        d["tail"] = t.tail;
        d["remainder_bound"] = t.remainder_bound;
        d["truncation_degree"] = t.truncation_degree;
        return d;
    });

    m.def(
        "run_suite",
        [](const std::string& suite, const std::string& config, const std::string& out, int jobs, bool record) {
            RunOptions o;
            o.jobs = jobs;
            o.record = record;
            SuiteResult r;
            {
                py::gil_scoped_release release;
                r = run_suite(suite, load_config(config), o);
                if (!out.empty()) write_outputs(r, out);
            }
            py::list checks;
            for (const auto& row : r.checks) checks.append(check_dict(row));
            py::dict d;
            d["checks"] = checks;
            d["failures"] = r.failures();
            std::vector<std::string> tables;
            for (const auto& [name, t] : r.tables) tables.push_back(name);
            d["tables"] = tables;
            return d;
        },
        py::arg("suite"), py::arg("config"), py::arg("out") = "", py::arg("jobs") = 1, py::arg("record") = false);
}
