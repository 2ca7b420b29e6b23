#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pensionopt/cli.hpp"
#include "pensionopt/closed_form.hpp"
#include "pensionopt/config.hpp"
#include "pensionopt/frontier.hpp"
#include "pensionopt/mc_engine.hpp"
#include "pensionopt/oracle.hpp"
#include "pensionopt/pde_engine.hpp"

namespace py = pybind11;
using namespace pensionopt;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

RunConfig config_from_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "DC/DB switching option pricers";

    py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
    py::register_exception<NonConvergenceError>(mod, "NonConvergenceError", PyExc_RuntimeError);

    py::enum_<Method>(mod, "Method")
        .value("ClosedForm", Method::ClosedForm)
        .value("MC", Method::MC)
        .value("LSMC", Method::LSMC)
        .value("PDE", Method::PDE)
        .value("Oracle", Method::Oracle);
    py::enum_<AboMode>(mod, "AboMode")
        .value("DiscreteFinalYear", AboMode::DiscreteFinalYear)
        .value("ContinuousCurrent", AboMode::ContinuousCurrent);
    py::enum_<SalaryVariant>(mod, "SalaryVariant")
        .value("StochasticHedgeable", SalaryVariant::StochasticHedgeable)
        .value("DeterministicSalary", SalaryVariant::DeterministicSalary);
    py::enum_<Regime>(mod, "Regime")
        .value("AllFinite", Regime::AllFinite)
        .value("PartiallyInfinite", Regime::PartiallyInfinite)
        .value("DegenerateEuropean", Regime::DegenerateEuropean)
        .value("KnifeEdge", Regime::KnifeEdge);

    py::class_<PlanParams>(mod, "PlanParams")
        .def(py::init<>())
        .def_readwrite("c", &PlanParams::c)
        .def_readwrite("b", &PlanParams::b)
        .def_readwrite("annuity_factor", &PlanParams::annuity_factor)
        .def_readwrite("T", &PlanParams::T)
        .def_readwrite("gamma", &PlanParams::gamma);
    py::class_<MarketParams>(mod, "MarketParams")
        .def(py::init<>())
        .def_readwrite("r", &MarketParams::r)
        .def_readwrite("sigma_s", &MarketParams::sigma_s)
        .def_readwrite("mu_l", &MarketParams::mu_l)
        .def_readwrite("sigma_l", &MarketParams::sigma_l)
        .def_readwrite("rho", &MarketParams::rho);
    py::class_<McSpec>(mod, "McSpec")
        .def(py::init<>())
        .def_readwrite("n_paths", &McSpec::n_paths)
        .def_readwrite("steps_per_year", &McSpec::steps_per_year)
        .def_readwrite("seed", &McSpec::seed)
        .def_readwrite("antithetic", &McSpec::antithetic)
        .def_readwrite("basis_degree", &McSpec::basis_degree)
        .def_readwrite("workers", &McSpec::workers);
    py::class_<GridSpec>(mod, "GridSpec")
        .def(py::init<>())
        .def_readwrite("y_max", &GridSpec::y_max)
        .def_readwrite("n_y", &GridSpec::n_y)
        .def_readwrite("n_t", &GridSpec::n_t)
        .def_readwrite("penalty", &GridSpec::penalty)
        .def_readwrite("tol", &GridSpec::tol)
        .def_readwrite("max_iter", &GridSpec::max_iter)
        .def_readwrite("stretch", &GridSpec::stretch);
    py::class_<OracleSpec>(mod, "OracleSpec")
        .def(py::init<>())
        .def_readwrite("w_max", &OracleSpec::w_max)
        .def_readwrite("n_w", &OracleSpec::n_w)
        .def_readwrite("n_quad", &OracleSpec::n_quad)
        .def_readwrite("grid_scale", &OracleSpec::grid_scale)
        .def_readwrite("early_exercise", &OracleSpec::early_exercise);

    py::class_<PriceEstimate>(mod, "PriceEstimate")
        .def_readonly("value", &PriceEstimate::value)
        .def_readonly("std_error", &PriceEstimate::std_error)
        .def_readonly("method", &PriceEstimate::method)
        .def("__repr__", [](const PriceEstimate& e) {
            return "PriceEstimate(value=" + std::to_string(e.value) + ", std_error=" + std::to_string(e.std_error) +
                   ", method=" + std::string(to_string(e.method)) + ")";
        });
    py::class_<FseResult>(mod, "FseResult")
        .def_readonly("extra_cost", &FseResult::extra_cost)
        .def_readonly("t_star", &FseResult::t_star)
        .def_readonly("t_prime", &FseResult::t_prime)
        .def_readonly("t_star_at_start", &FseResult::t_star_at_start);
    py::class_<Bs1Result>(mod, "Bs1Result")
        .def_readonly("value", &Bs1Result::value)
        .def_readonly("d1", &Bs1Result::d1)
        .def_readonly("d2", &Bs1Result::d2)
        .def_readonly("exercise", &Bs1Result::exercise)
        .def_readonly("v", &Bs1Result::v);
    py::class_<BoundaryClass>(mod, "BoundaryClass")
        .def_readonly("regime", &BoundaryClass::regime)
        .def_readonly("t_star", &BoundaryClass::t_star)
        .def_readonly("t_prime", &BoundaryClass::t_prime)
        .def_readonly("ratio", &BoundaryClass::ratio);
    py::class_<ValueSurface>(mod, "ValueSurface")
        .def_property_readonly("times", [](const ValueSurface& s) { return to_array(s.times); })
        .def_property_readonly("y", [](const ValueSurface& s) { return to_array(s.y); })
        .def_property_readonly("values",
                               [](const ValueSurface& s) {
                                   py::array_t<double> a({s.times.size(), s.y.size()});
                                   std::copy(s.values.begin(), s.values.end(), a.mutable_data());
                                   return a;
                               })
        .def_readonly("converged", &ValueSurface::converged)
        .def("value_at", &ValueSurface::value_at, py::arg("y0"));
    py::class_<Frontier>(mod, "Frontier")
        .def_property_readonly("times", [](const Frontier& f) { return to_array(f.times); })
        .def_property_readonly("phi", [](const Frontier& f) { return to_array(f.phi); });
    py::class_<LsmcResult>(mod, "LsmcResult")
        .def_readonly("option", &LsmcResult::option)
        .def_readonly("db_pv", &LsmcResult::db_pv)
        .def_readonly("full_cost", &LsmcResult::full_cost);
    py::class_<RunConfig>(mod, "RunConfig")
        .def(py::init<>())
        .def_readwrite("plan", &RunConfig::plan)
        .def_readwrite("market", &RunConfig::market)
        .def_readwrite("mc", &RunConfig::mc)
        .def_readwrite("grid", &RunConfig::grid)
        .def_readwrite("oracle", &RunConfig::oracle)
        .def_readwrite("salary", &RunConfig::salary);

    mod.def("db_cost", &db_cost, py::arg("plan"), py::arg("market"), py::arg("mode"));
    mod.def("dc_cost", &dc_cost, py::arg("plan"), py::arg("market"), py::arg("mode"));
    mod.def("fse_stoch_cont", &fse_stoch_cont, py::arg("t"), py::arg("l"), py::arg("plan"), py::arg("market"));
    mod.def("fse_det_cont", &fse_det_cont, py::arg("t"), py::arg("l"), py::arg("plan"), py::arg("market"));
    mod.def("fse_discrete", &fse_discrete, py::arg("t"), py::arg("l"), py::arg("plan"), py::arg("market"));
    mod.def("bs_one_period", &bs_one_period, py::arg("w"), py::arg("plan"), py::arg("market"));
    mod.def("classify_discrete", &classify_discrete, py::arg("plan"), py::arg("market"));
    mod.def("classify_continuous", &classify_continuous, py::arg("plan"), py::arg("market"),
            py::arg("variant") = SalaryVariant::StochasticHedgeable);

    mod.def(
        "solve_bermudan",
        [](const PlanParams& p, const MarketParams& m, SalaryVariant v, const GridSpec& g) {
            py::gil_scoped_release release;
            return solve_bermudan(build_ratio_model(p, m, v), g, p, m);
        },
        py::arg("plan"), py::arg("market"), py::arg("variant") = SalaryVariant::DeterministicSalary,
        py::arg("grid") = GridSpec{});
    mod.def(
        "solve_european",
        [](const PlanParams& p, const MarketParams& m, SalaryVariant v, const GridSpec& g) {
            py::gil_scoped_release release;
            return solve_european(build_ratio_model(p, m, v), g, p, m);
        },
        py::arg("plan"), py::arg("market"), py::arg("variant") = SalaryVariant::DeterministicSalary,
        py::arg("grid") = GridSpec{});
    mod.def("extract_frontier", &extract_frontier, py::arg("surface"), py::arg("plan"), py::arg("market"));

    mod.def(
        "price_underpin_mc",
        [](const PlanParams& p, const MarketParams& m, const McSpec& spec) {
            py::gil_scoped_release release;
            return price_underpin_mc(spec, p, m);
        },
        py::arg("plan"), py::arg("market"), py::arg("spec") = McSpec{});
    mod.def(
        "price_bermudan_lsmc",
        [](const PlanParams& p, const MarketParams& m, const McSpec& spec, int t0, double w0) {
            py::gil_scoped_release release;
            return price_bermudan_lsmc(spec, p, m, t0, w0);
        },
        py::arg("plan"), py::arg("market"), py::arg("spec") = McSpec{}, py::arg("t0") = 0, py::arg("w0") = 0.0);
    mod.def(
        "dp_value",
        [](const PlanParams& p, const MarketParams& m, const OracleSpec& spec, int t0, double w0) {
            py::gil_scoped_release release;
            return dp_value(t0, w0, spec, p, m);
        },
        py::arg("plan"), py::arg("market"), py::arg("spec") = OracleSpec{}, py::arg("t0") = 0, py::arg("w0") = 0.0);

    mod.def("parse_config", &config_from_text, py::arg("text"), "Config from key = value text.");
    mod.def("load_config", &load_config, py::arg("path"));
    mod.def(
        "price",
        [](const std::string& product, const std::string& setting, const RunConfig& cfg) {
            py::gil_scoped_release release;
            return price_product(parse_product(product), parse_setting(setting), cfg.plan, cfg.market, cfg);
        },
        py::arg("product"), py::arg("setting"), py::arg("config") = RunConfig{});
    mod.def(
        "table_csv",
        [](const std::string& which, const RunConfig& cfg) {
            py::gil_scoped_release release;
            return table_csv(build_table(which, cfg));
        },
        py::arg("which"), py::arg("config") = RunConfig{});
}
