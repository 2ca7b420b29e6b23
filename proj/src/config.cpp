#include "pensionopt/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pensionopt {

const char* to_string(Product p) {
    switch (p) {
        case Product::Fse: return "fse";
        case Product::Underpin: return "underpin";
        case Product::Bermudan: return "bermudan";
    }
    return "unknown";
}

const char* to_string(Setting s) { return s == Setting::Discrete ? "discrete" : "continuous"; }

Product parse_product(const std::string& s) {
    if (s == "fse") return Product::Fse;
    if (s == "underpin") return Product::Underpin;
    if (s == "bermudan") return Product::Bermudan;
    throw ConfigError("unknown product '" + s + "' (expected fse, underpin or bermudan)");
}

Setting parse_setting(const std::string& s) {
    if (s == "discrete") return Setting::Discrete;
    if (s == "continuous") return Setting::Continuous;
    throw ConfigError("unknown setting '" + s + "' (expected discrete or continuous)");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
    Int out{};
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"plan.c", [](RunConfig& c, auto& k, auto& v) { c.plan.c = to_double(k, v); }},
        {"plan.b", [](RunConfig& c, auto& k, auto& v) { c.plan.b = to_double(k, v); }},
        {"plan.annuity_factor", [](RunConfig& c, auto& k, auto& v) { c.plan.annuity_factor = to_double(k, v); }},
        {"plan.T", [](RunConfig& c, auto& k, auto& v) { c.plan.T = to_double(k, v); }},
        {"plan.gamma",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "r" || v.empty()) c.plan.gamma.reset();
             else c.plan.gamma = to_double(k, v);
         }},
        {"market.r", [](RunConfig& c, auto& k, auto& v) { c.market.r = to_double(k, v); }},
        {"market.sigma_s", [](RunConfig& c, auto& k, auto& v) { c.market.sigma_s = to_double(k, v); }},
        {"market.mu_l", [](RunConfig& c, auto& k, auto& v) { c.market.mu_l = to_double(k, v); }},
        {"market.sigma_l", [](RunConfig& c, auto& k, auto& v) { c.market.sigma_l = to_double(k, v); }},
        {"market.rho", [](RunConfig& c, auto& k, auto& v) { c.market.rho = to_double(k, v); }},
        {"model.salary",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "deterministic") c.salary = SalaryVariant::DeterministicSalary;
             else if (v == "stochastic") c.salary = SalaryVariant::StochasticHedgeable;
             else throw ConfigError(k + ": expected deterministic or stochastic, got '" + v + "'");
         }},
        {"model.discrete_method",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "mc") c.discrete_method = DiscreteMethod::MonteCarlo;
             else if (v == "oracle") c.discrete_method = DiscreteMethod::Oracle;
             else throw ConfigError(k + ": expected mc or oracle, got '" + v + "'");
         }},
        {"mc.n_paths", [](RunConfig& c, auto& k, auto& v) { c.mc.n_paths = to_int<std::size_t>(k, v); }},
        {"mc.steps_per_year", [](RunConfig& c, auto& k, auto& v) { c.mc.steps_per_year = to_int<int>(k, v); }},
        {"mc.seed", [](RunConfig& c, auto& k, auto& v) { c.mc.seed = to_int<std::uint64_t>(k, v); }},
        {"mc.antithetic", [](RunConfig& c, auto& k, auto& v) { c.mc.antithetic = to_bool(k, v); }},
        {"mc.basis_degree", [](RunConfig& c, auto& k, auto& v) { c.mc.basis_degree = to_int<int>(k, v); }},
        {"mc.workers", [](RunConfig& c, auto& k, auto& v) { c.mc.workers = to_int<unsigned>(k, v); }},
        {"grid.y_max", [](RunConfig& c, auto& k, auto& v) { c.grid.y_max = to_double(k, v); }},
        {"grid.n_y", [](RunConfig& c, auto& k, auto& v) { c.grid.n_y = to_int<int>(k, v); }},
        {"grid.n_t", [](RunConfig& c, auto& k, auto& v) { c.grid.n_t = to_int<int>(k, v); }},
        {"grid.penalty", [](RunConfig& c, auto& k, auto& v) { c.grid.penalty = to_double(k, v); }},
        {"grid.tol", [](RunConfig& c, auto& k, auto& v) { c.grid.tol = to_double(k, v); }},
        {"grid.max_iter", [](RunConfig& c, auto& k, auto& v) { c.grid.max_iter = to_int<int>(k, v); }},
        {"grid.stretch", [](RunConfig& c, auto& k, auto& v) { c.grid.stretch = to_double(k, v); }},
        {"grid.scheme",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "rannacher") c.grid.scheme = TimeScheme::Rannacher;
             else if (v == "crank_nicolson") c.grid.scheme = TimeScheme::CrankNicolson;
             else throw ConfigError(k + ": expected rannacher or crank_nicolson, got '" + v + "'");
         }},
        {"oracle.w_max", [](RunConfig& c, auto& k, auto& v) { c.oracle.w_max = to_double(k, v); }},
        {"oracle.n_w", [](RunConfig& c, auto& k, auto& v) { c.oracle.n_w = to_int<int>(k, v); }},
        {"oracle.n_quad", [](RunConfig& c, auto& k, auto& v) { c.oracle.n_quad = to_int<int>(k, v); }},
        {"oracle.grid_scale", [](RunConfig& c, auto& k, auto& v) { c.oracle.grid_scale = to_double(k, v); }},
        {"oracle.interpolation",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "linear") c.oracle.interpolation = Interpolation::Linear;
             else if (v == "monotone_cubic") c.oracle.interpolation = Interpolation::MonotoneCubic;
             else throw ConfigError(k + ": expected linear or monotone_cubic, got '" + v + "'");
         }},
        {"oracle.quadrature",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "exact_linear") c.oracle.quadrature = Quadrature::ExactLinear;
             else if (v == "gauss_hermite") c.oracle.quadrature = Quadrature::GaussHermite;
             else throw ConfigError(k + ": expected exact_linear or gauss_hermite, got '" + v + "'");
         }},
        {"sweep.param", [](RunConfig& c, auto&, auto& v) { c.sweep_param = v; }},
        {"sweep.values",
         [](RunConfig& c, auto& k, auto& v) {
             c.sweep_values.clear();
             for (const auto& item : split_list(v)) c.sweep_values.push_back(to_double(k, item));
         }},
        {"sweep.products",
         [](RunConfig& c, auto& k, auto& v) {
             c.sweep_products.clear();
             for (const auto& item : split_list(v)) {
                 try {
                     c.sweep_products.push_back(parse_product(item));
                 } catch (const ConfigError& e) {
                     throw ConfigError(k + ": " + e.what());
                 }
             }
         }},
        {"sweep.setting",
         [](RunConfig& c, auto& k, auto& v) {
             try {
                 c.sweep_setting = parse_setting(v);
             } catch (const ConfigError& e) {
                 throw ConfigError(k + ": " + e.what());
             }
         }},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [k, _] : setters()) out.push_back(k);
        return out;
    }();
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, key, value);
}

void validate(const RunConfig& cfg) {
    try {
        validate(cfg.plan);
        validate(cfg.market);
        validate(cfg.mc);
        validate(cfg.oracle);
        if (cfg.grid.n_y < 50) throw std::invalid_argument("grid.n_y: must be >= 50");
        if (cfg.grid.n_t < 0) throw std::invalid_argument("grid.n_t: must be >= 0 (0 selects 100 T)");
        if (cfg.grid.n_t > 0 && cfg.grid.n_t < 4.0 * cfg.plan.T)
            throw std::invalid_argument("grid.n_t: must be >= 4 T");
        if (cfg.grid.penalty < 1e6) throw std::invalid_argument("grid.penalty: must be >= 1e6");
        if (!(cfg.grid.tol > 0.0)) throw std::invalid_argument("grid.tol: must be > 0");
        if (cfg.grid.max_iter < 1) throw std::invalid_argument("grid.max_iter: must be >= 1");
        if (cfg.grid.y_max < 0.0) throw std::invalid_argument("grid.y_max: must be >= 0 (0 selects the default)");
        if (cfg.grid.stretch < 0.0) throw std::invalid_argument("grid.stretch: must be >= 0");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace pensionopt
