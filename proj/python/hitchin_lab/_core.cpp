// Python bindings for the disk-model numerics. Results that carry many
// measured quantities come back as dicts; tables of psi values as lists.
#include "hitchin/acceptance.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace hitchin;

namespace {

py::object number(double x) { return std::isnan(x) ? py::none() : py::object(py::float_(x)); }

py::dict fit_dict(const PowerLawFit& f) {
  py::dict d;
  d["exponent"] = f.exponent;
  d["coefficient"] = f.coefficient;
  d["r_squared"] = f.r_squared;
  d["t_lo"] = f.t_lo;
  d["t_hi"] = f.t_hi;
  d["upper_half_exponent"] = number(f.upper_half_exponent);
  d["semilog_rate"] = f.semilog_rate;
  d["prefers_exponential"] = f.prefers_exponential;
  d["residuals"] = f.residuals;
  return d;
}

std::vector<Sample> samples(const std::vector<double>& ts, const std::vector<double>& values) {
  if (ts.size() != values.size()) throw py::value_error("t and values differ in length");
  std::vector<Sample> s;
  for (std::size_t i = 0; i < ts.size(); ++i) s.push_back({ts[i], values[i]});
  return s;
}

QuadratureSpec quad(int n_r, int n_theta) {
  QuadratureSpec s;
  s.n_r = n_r;
  s.n_theta = n_theta;
  return s;
}

py::dict criterion_dict(const CriterionResult& r) {
  py::dict values;
  for (const auto& [k, v] : r.values) values[py::str(k)] = number(v);
  py::dict d;
  d["id"] = r.id;
  d["name"] = r.name;
  d["pass"] = r.pass;
  d["values"] = values;
  d["failures"] = r.failures;
  d["line"] = r.line();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerics of the disk model of the Hitchin moduli space";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("bessel_k0", &bessel_k0, py::arg("x"));
  m.def("bessel_k1", &bessel_k1, py::arg("x"));

  py::class_<PainleveTable>(m, "PainleveTable")
      .def_readonly("rho", &PainleveTable::rho)
      .def_readonly("psi", &PainleveTable::psi)
      .def_readonly("rho_dpsi", &PainleveTable::rho_dpsi)
      .def_property_readonly("rho_min", [](const PainleveTable& t) { return t.meta.rho_min; })
      .def_property_readonly("rho_max", [](const PainleveTable& t) { return t.meta.rho_max; })
      .def_property_readonly("ode_residual_max", [](const PainleveTable& t) {
        double mx = 0.0;
        for (double r : ode_residuals(t)) mx = std::max(mx, std::abs(r));
        return mx;
      })
      .def("__len__", [](const PainleveTable& t) { return t.rho.size(); });

  m.def("solve_psi", [](double rho_min, double rho_max, int n, double tol) {
          return solve_psi(rho_min, rho_max, n, tol);
        },
        py::arg("rho_min") = 1e-6, py::arg("rho_max") = 16.0, py::arg("n") = 16384,
        py::arg("tol") = 1e-8, py::call_guard<py::gil_scoped_release>());
  m.def("default_table", &default_table, py::return_value_policy::reference,
        "Shared table, cached under HITCHIN_CACHE_DIR when set.");
  m.def("eval_psi", [](const PainleveTable& t, double rho) {
          const PsiValue v = eval_psi(t, rho);
          return py::make_tuple(v.psi, v.rho_dpsi);
        },
        py::arg("table"), py::arg("rho"), "(psi, rho psi') at rho");
  m.def("profile_eval", [](const PainleveTable& table, double t, double r) {
          const ProfileEval p = profile_eval(table, t, r);
          py::dict d;
          d["h"] = p.h;
          d["r_dh"] = p.r_dh;
          d["f"] = p.f;
          d["df"] = p.df;
          return d;
        },
        py::arg("table"), py::arg("t"), py::arg("r"));

  py::class_<QuadDifferentialModel>(m, "QuadDifferential")
      .def(py::init<std::vector<cd>, std::vector<cd>>(), py::arg("coeffs") = std::vector<cd>{0.0, 1.0},
           py::arg("dot_coeffs") = std::vector<cd>{1.0})
      .def_readonly("coeffs", &QuadDifferentialModel::coeffs)
      .def_readonly("dot_coeffs", &QuadDifferentialModel::dot_coeffs)
      .def("f", &QuadDifferentialModel::f)
      .def("fdot", &QuadDifferentialModel::fdot)
      .def("radial", &QuadDifferentialModel::radial)
      .def("normalized", &QuadDifferentialModel::normalized);

  m.def("sk_metric", [](const QuadDifferentialModel& q, int n_r, int n_theta) {
          return sk_metric(q, quad(n_r, n_theta)).value;
        },
        py::arg("q"), py::arg("n_r") = 256, py::arg("n_theta") = 64);
  m.def("kahler_potential", [](const QuadDifferentialModel& q, int n_r, int n_theta) {
          return kahler_potential(q, quad(n_r, n_theta)).value;
        },
        py::arg("q"), py::arg("n_r") = 256, py::arg("n_theta") = 64);
  m.def("cone_check", [](const QuadDifferentialModel& q, const std::vector<double>& scales) {
          const ConeReport c = cone_check(q, scales);
          py::dict d;
          d["homogeneity_ratio"] = c.homogeneity_ratio;
          d["radial_ratio"] = c.radial_ratio;
          d["kahler_ratio"] = c.kahler_ratio;
          d["max_rel_error"] = c.max_rel_error;
          d["unit_speed"] = c.unit_speed;
          return d;
        },
        py::arg("q"), py::arg("scales"));
  m.def("chart_crosscheck", [](const QuadDifferentialModel& q, int n_r, int n_theta) {
          const ChartReport c = chart_crosscheck(q, quad(n_r, n_theta));
          return py::make_tuple(c.z_chart, c.w_chart, c.rel_mismatch);
        },
        py::arg("q"), py::arg("n_r") = 2048, py::arg("n_theta") = 64,
        "(z-chart value, w-chart value, relative mismatch)");

  m.def("fit_power_law", [](const std::vector<double>& ts, const std::vector<double>& values,
                            bool all) {
          return fit_dict(fit_power_law(samples(ts, values), all ? Window::all : Window::asymptotic));
        },
        py::arg("t"), py::arg("values"), py::arg("all_points") = false);
  m.def("peel_expansion", [](const std::vector<double>& ts, const std::vector<double>& values,
                             const std::vector<double>& ladder, double floor) {
          const ExpansionPeel p = peel_expansion(samples(ts, values), ladder, floor);
          py::dict d;
          d["coefficients"] = p.coefficients;
          d["terms_used"] = p.terms_used;
          d["residual_max"] = p.residual_max;
          return d;
        },
        py::arg("t"), py::arg("values"), py::arg("ladder"), py::arg("noise_floor") = 1e-12);
  m.def("packet_integral", &packet_integral_radial, py::arg("f"), py::arg("j"), py::arg("t"),
        "int_0^1 f(t^{2/3} r) r^j dr");

  m.def("metric_difference_table",
        [](const PainleveTable& table, const std::vector<double>& t_grid,
           const std::vector<std::string>& directions, int nodes_per_octave, int n_theta) {
          SweepSettings s;
          s.nodes_per_octave = nodes_per_octave;
          s.n_theta = n_theta;
          MetricTable mt;
          {
            py::gil_scoped_release release;
            mt = metric_difference_table(table, t_grid, directions, s);
          }
          py::list rows;
          for (const TableRow& r : mt.rows) {
            py::dict d;
            d["direction"] = r.direction;
            d["exponent"] = number(r.exponent);
            d["coefficient"] = number(r.coefficient);
            d["r_squared"] = number(r.r_squared);
            d["expected"] = r.expected;
            d["identically_zero"] = r.identically_zero;
            std::vector<double> vals;
            for (const Sample& x : r.samples) vals.push_back(x.value);
            d["values"] = vals;
            rows.append(d);
          }
          return rows;
        },
        py::arg("table"), py::arg("t_grid"),
        py::arg("directions") = std::vector<std::string>{"rr", "hh", "vv", "rh", "rv", "hv"},
        py::arg("nodes_per_octave") = 12, py::arg("n_theta") = 64);

  m.def("run_acceptance", [](const std::vector<int>& ids) {
          std::vector<CriterionResult> rs;
          {
            py::gil_scoped_release release;
            rs = run_acceptance(default_table(), ids);
          }
          py::list out;
          for (const auto& r : rs) out.append(criterion_dict(r));
          return out;
        },
        py::arg("ids") = std::vector<int>{});
}
