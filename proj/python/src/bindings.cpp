#include "crlab/certificate.hpp"
#include "crlab/certify.hpp"
#include "crlab/elliptic.hpp"
#include "crlab/field_io.hpp"
#include "crlab/hessfield.hpp"
#include "crlab/scalar.hpp"
#include "crlab/suites.hpp"
#include "crlab/symfun.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace crlab;

namespace {

// Rationals cross the boundary as "p/q" strings; the Python layer turns them
// into fractions.Fraction.
symfun::Spectrum<Rational> rational_spectrum(const std::vector<std::string>& values) {
  std::vector<Rational> v;
  v.reserve(values.size());
  for (const auto& s : values) v.push_back(parse_rational(s));
  return symfun::Spectrum<Rational>(v);
}

std::string dump(const Certificate& c) { return to_json(c).dump(); }

py::dict solve_lncosh(const std::string& nl_id, int dim, double lo, double hi, double h, double tol, int max_iter) {
  const auto nl = elliptic::nonlinearity_from_id(nl_id);
  const auto grid = elliptic::Grid::box(dim, lo, hi, h);
  const int last = dim - 1;
  const elliptic::PointFunction bc = [last](const elliptic::Point& p) { return elliptic::exact_profile(p[last]); };
  auto result = elliptic::solve(nl, grid, bc, elliptic::harmonic_extension(grid, bc), tol, max_iter);

  double err = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const double exact = elliptic::exact_profile(grid.coord(grid.multi(f))[last]);
    err = std::max(err, std::abs(result.u.values[f] - exact));
  }
  py::dict out;
  out["values"] = result.u.values;
  out["counts"] = std::vector<std::size_t>(grid.counts.begin(), grid.counts.begin() + dim);
  out["iterations"] = result.report.iterations;
  out["converged"] = result.report.converged;
  out["final_residual_sup"] = result.report.final_residual_sup;
  out["reference_error_sup"] = err;
  out["field"] = py::bytes(encode_field(result.u));
  return out;
}

py::dict analyze_field(const py::bytes& field, const std::string& nl_id, std::optional<double> tol) {
  const auto u = decode_field(std::string(field));
  const auto nl = elliptic::nonlinearity_from_id(nl_id);
  const auto v = hessfield::verify_conclusions(u, nl, tol.value_or(hessfield::default_tol(u.grid.h)));
  py::dict out;
  out["applicable"] = v.applicable;
  out["pass"] = v.pass;
  out["min_rank"] = v.min_rank;
  out["max_rank"] = v.max_rank;
  std::vector<std::string> recs;
  for (const auto& c : v.records()) recs.push_back(dump(c));
  out["records"] = recs;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<elliptic::RangeError>(m, "RangeError", PyExc_ArithmeticError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  m.attr("__version__") = std::string(tool_version());

  m.def("sigma", [](const std::vector<std::string>& v, int k) { return to_string(symfun::sigma(rational_spectrum(v), k)); });
  m.def("sigma_float", [](const std::vector<double>& v, int k) { return symfun::sigma(symfun::Spectrum<double>(v), k); });
  m.def("sigma_minor", [](const std::vector<std::string>& v, int k, const std::vector<std::size_t>& excluded) {
    return to_string(symfun::sigma_minor(rational_spectrum(v), k, std::span<const std::size_t>(excluded)));
  });
  m.def("euler_residual",
        [](const std::vector<std::string>& v, int k) { return to_string(symfun::euler_identity_residual(rational_spectrum(v), k)); });

  m.def("certify_B_nonpositive", [](const std::string& A) { return dump(certify::certify_B_nonpositive(parse_rational(A))); });
  m.def("certify_a1_threshold",
        [](int n, const std::string& A) { return dump(certify::certify_a1_threshold(n, parse_rational(A))); });
  m.def("closed_form_minor", [](const std::string& alpha, int k) {
    return to_string(certify::closed_form_minor(parse_rational(alpha), k));
  });

  m.def("suite_names", &suites::suite_names);
  m.def(
      "run_suite",
      [](const std::string& name, std::uint64_t seed, bool quick, std::optional<std::string> A, std::optional<int> n) {
        suites::SuiteOptions opts;
        opts.seed = seed;
        opts.quick = quick;
        if (A) opts.A = parse_rational(*A);
        opts.n = n;
        std::vector<std::string> out;
        for (const auto& c : suites::run_suite(name, opts)) out.push_back(dump(c));
        return out;
      },
      py::arg("name"), py::arg("seed"), py::arg("quick"), py::arg("A") = py::none(), py::arg("n") = py::none());

  m.def("exact_profile", &elliptic::exact_profile);
  m.def("solve_lncosh", &solve_lncosh, py::arg("nl"), py::arg("dim"), py::arg("lo"), py::arg("hi"), py::arg("h"),
        py::arg("tol") = elliptic::kDefaultTol, py::arg("max_iter") = elliptic::kDefaultMaxIter);
  m.def("analyze_field", &analyze_field, py::arg("field"), py::arg("nl"), py::arg("tol") = py::none());
  m.def("read_field", [](const std::string& path) { return py::bytes(encode_field(read_field_binary(path))); });
}
